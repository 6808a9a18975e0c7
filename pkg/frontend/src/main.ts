import { mountApp } from "./app.js";

const app = mountApp(document);
void app.start().catch((error) => {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = `Could not load the assessment data: ${error}`;
  document.body.prepend(banner);
});
