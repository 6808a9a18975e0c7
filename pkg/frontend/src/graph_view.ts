// SVG rendering of the call-graph with pan, zoom, and node selection.
// Vulnerable functions are visually highlighted; clicking a node invokes
// the selection callback exactly once per click.

import { layoutGraph, type Point } from "./layout.js";
import type { GraphPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 900;
const HEIGHT = 600;
const NODE_RADIUS = 10;

export interface GraphViewOptions {
  onSelect: (name: string) => void;
}

export class GraphView {
  private selected: string | null = null;
  private nodeElements = new Map<string, SVGGElement>();
  private viewport: SVGGElement | null = null;
  private panX = 0;
  private panY = 0;
  private zoom = 1;

  constructor(
    private readonly container: HTMLElement,
    private readonly options: GraphViewOptions,
  ) {}

  render(graph: GraphPayload): void {
    this.container.textContent = "";
    this.nodeElements.clear();
    if (graph.nodes.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "The call-graph is empty.";
      this.container.appendChild(empty);
      return;
    }

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
    svg.classList.add("graph-canvas");

    const defs = document.createElementNS(SVG_NS, "defs");
    defs.innerHTML =
      '<marker id="arrow" viewBox="0 0 10 10" refX="18" refY="5" ' +
      'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
      '<path d="M 0 0 L 10 5 L 0 10 z" class="edge-arrow"/></marker>';
    svg.appendChild(defs);

    const viewport = document.createElementNS(SVG_NS, "g");
    this.viewport = viewport;
    svg.appendChild(viewport);

    const names = graph.nodes.map((node) => node.name);
    const positions = layoutGraph(names, graph.edges, WIDTH, HEIGHT);

    for (const [caller, callee] of graph.edges) {
      const from = positions.get(caller);
      const to = positions.get(callee);
      if (!from || !to) {
        continue;
      }
      viewport.appendChild(this.edgeLine(from, to, caller === callee));
    }

    for (const node of graph.nodes) {
      const point = positions.get(node.name)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.classList.add("node");
      if (node.vulnerable) {
        group.classList.add("vulnerable");
      }
      if (node.is_interface) {
        group.classList.add("interface");
      }
      group.setAttribute("transform", `translate(${point.x},${point.y})`);
      group.setAttribute("data-name", node.name);

      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("r", String(NODE_RADIUS));
      group.appendChild(circle);

      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("dy", String(-NODE_RADIUS - 4));
      label.textContent = node.name;
      group.appendChild(label);

      group.addEventListener("click", (event) => {
        event.stopPropagation();
        this.select(node.name);
        this.options.onSelect(node.name);
      });
      viewport.appendChild(group);
      this.nodeElements.set(node.name, group);
    }

    this.wirePanZoom(svg);
    this.container.appendChild(svg);
  }

  private edgeLine(from: Point, to: Point, selfLoop: boolean): SVGElement {
    if (selfLoop) {
      const path = document.createElementNS(SVG_NS, "path");
      const r = NODE_RADIUS * 1.6;
      path.setAttribute(
        "d",
        `M ${from.x + NODE_RADIUS} ${from.y} a ${r} ${r} 0 1 1 ${-NODE_RADIUS} ${-NODE_RADIUS}`,
      );
      path.classList.add("edge");
      return path;
    }
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.classList.add("edge");
    line.setAttribute("marker-end", "url(#arrow)");
    return line;
  }

  /** Mark a node as selected (style only; no event emission). */
  select(name: string): void {
    if (this.selected) {
      this.nodeElements.get(this.selected)?.classList.remove("selected");
    }
    this.selected = name;
    this.nodeElements.get(name)?.classList.add("selected");
  }

  private applyTransform(): void {
    this.viewport?.setAttribute(
      "transform",
      `translate(${this.panX},${this.panY}) scale(${this.zoom})`,
    );
  }

  private wirePanZoom(svg: SVGSVGElement): void {
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    svg.addEventListener("mousedown", (event) => {
      dragging = true;
      lastX = event.clientX;
      lastY = event.clientY;
    });
    svg.addEventListener("mousemove", (event) => {
      if (!dragging) {
        return;
      }
      this.panX += event.clientX - lastX;
      this.panY += event.clientY - lastY;
      lastX = event.clientX;
      lastY = event.clientY;
      this.applyTransform();
    });
    svg.addEventListener("mouseup", () => {
      dragging = false;
    });
    svg.addEventListener("mouseleave", () => {
      dragging = false;
    });
    svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = event.deltaY < 0 ? 1.15 : 1 / 1.15;
      this.zoom = Math.min(8, Math.max(0.2, this.zoom * factor));
      this.applyTransform();
    });
  }
}
