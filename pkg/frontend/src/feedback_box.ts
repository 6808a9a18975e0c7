// Multi-line feedback submission with optional contact details. Empty
// text never reaches the server: the submit button stays disabled and the
// handler guards again.

import type { TriageApi } from "./api.js";

export class FeedbackBox {
  private status = "";

  constructor(
    private readonly container: HTMLElement,
    private readonly api: TriageApi,
    private readonly actor: () => string,
    private readonly selectedFunctions: () => string[],
  ) {}

  render(): void {
    this.container.textContent = "";

    const heading = document.createElement("h3");
    heading.textContent = "Feedback";
    this.container.appendChild(heading);

    const textarea = document.createElement("textarea");
    textarea.placeholder =
      "Comments on the assessed functions and their predicted severities...";
    textarea.rows = 4;
    this.container.appendChild(textarea);

    const contactRow = document.createElement("div");
    contactRow.className = "contact-row";
    const name = document.createElement("input");
    name.placeholder = "Name (optional)";
    const email = document.createElement("input");
    email.placeholder = "Email (optional)";
    email.type = "email";
    contactRow.appendChild(name);
    contactRow.appendChild(email);
    this.container.appendChild(contactRow);

    const submit = document.createElement("button");
    submit.textContent = "Send feedback";
    submit.disabled = true;
    this.container.appendChild(submit);

    const status = document.createElement("p");
    status.className = "feedback-status";
    status.textContent = this.status;
    this.container.appendChild(status);

    textarea.addEventListener("input", () => {
      submit.disabled = textarea.value.trim() === "";
    });

    submit.addEventListener("click", () => {
      const text = textarea.value.trim();
      if (text === "") {
        return; // guarded: the server would reject it anyway
      }
      void this.api
        .feedback(this.selectedFunctions(), text, this.actor(), {
          name: name.value.trim(),
          email: email.value.trim(),
        })
        .then((ack) => {
          this.status = `Thank you. Your feedback was stored as ${ack.id}.`;
          this.render();
        });
    });
  }
}
