// Expandable source pane. Shows the selected function's file with the
// vulnerable instruction lines highlighted; expanding it reports a
// source_expanded interaction (once per function per session).

import type { GraphNode, GraphPayload } from "./types.js";

export interface SourceViewOptions {
  onExpand: (fn: string) => void;
}

export class SourceView {
  private graph: GraphPayload | null = null;
  private node: GraphNode | null = null;
  private expanded = false;

  constructor(
    private readonly container: HTMLElement,
    private readonly options: SourceViewOptions,
  ) {}

  setGraph(graph: GraphPayload): void {
    this.graph = graph;
  }

  show(fn: string): void {
    this.node = this.graph?.nodes.find((n) => n.name === fn) ?? null;
    this.expanded = false;
    this.render();
  }

  private sourceText(): string | null {
    if (!this.node?.file || !this.graph?.sources) {
      return null;
    }
    return this.graph.sources[this.node.file] ?? null;
  }

  render(): void {
    this.container.textContent = "";
    if (!this.node) {
      return;
    }
    const node = this.node;

    const header = document.createElement("div");
    header.className = "source-header";
    const where = node.file ? `${node.file}:${node.line ?? "?"}` : "location unknown";
    header.textContent = `${node.name} (${where})`;
    this.container.appendChild(header);

    const toggle = document.createElement("button");
    toggle.className = "source-toggle";
    toggle.textContent = this.expanded ? "Hide source" : "View source";
    toggle.addEventListener("click", () => {
      this.expanded = !this.expanded;
      if (this.expanded) {
        this.options.onExpand(node.name);
      }
      this.render();
    });
    this.container.appendChild(toggle);

    if (!this.expanded) {
      return;
    }

    const text = this.sourceText();
    if (text === null) {
      const placeholder = document.createElement("p");
      placeholder.className = "empty-state";
      placeholder.textContent = "source unavailable";
      this.container.appendChild(placeholder);
      return;
    }

    const vulnerableLines = new Set(
      node.vulnerable_lines.filter((l) => l.file === node.file).map((l) => l.line),
    );
    const pre = document.createElement("pre");
    pre.className = "source-code";
    const lines = text.split("\n");
    lines.forEach((line, idx) => {
      const lineNo = idx + 1;
      const row = document.createElement("span");
      row.className = "source-line";
      if (vulnerableLines.has(lineNo)) {
        row.classList.add("vulnerable-line");
      }
      row.setAttribute("data-line", String(lineNo));
      row.textContent = `${String(lineNo).padStart(4)}  ${line}\n`;
      pre.appendChild(row);
    });
    this.container.appendChild(pre);
    const target = this.node.line ?? 1;
    const anchor = pre.querySelector(`[data-line="${target}"]`);
    anchor?.scrollIntoView?.({ block: "start" });
  }
}
