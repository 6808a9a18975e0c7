import { describe, expect, it } from "vitest";
import { layoutGraph } from "../src/layout.js";

const NAMES = ["main", "reader", "decoder", "helper", "leaf"];
const EDGES: [string, string][] = [
  ["main", "reader"],
  ["reader", "decoder"],
  ["decoder", "helper"],
  ["decoder", "leaf"],
];

describe("layoutGraph", () => {
  it("is deterministic for the same input", () => {
    const a = layoutGraph(NAMES, EDGES, 800, 600);
    const b = layoutGraph(NAMES, EDGES, 800, 600);
    expect(a).toEqual(b);
  });

  it("keeps every node inside the viewport", () => {
    const positions = layoutGraph(NAMES, EDGES, 800, 600);
    for (const { x, y } of positions.values()) {
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(800);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(600);
    }
  });

  it("separates nodes", () => {
    const positions = [...layoutGraph(NAMES, EDGES, 800, 600).values()];
    for (let i = 0; i < positions.length; i++) {
      for (let j = i + 1; j < positions.length; j++) {
        const dx = positions[i].x - positions[j].x;
        const dy = positions[i].y - positions[j].y;
        expect(Math.hypot(dx, dy)).toBeGreaterThan(5);
      }
    }
  });

  it("handles empty and single-node graphs", () => {
    expect(layoutGraph([], [], 800, 600).size).toBe(0);
    const single = layoutGraph(["only"], [], 800, 600);
    expect(single.get("only")).toEqual({ x: 400, y: 300 });
  });

  it("tolerates self-loops and unknown edge endpoints", () => {
    const positions = layoutGraph(
      ["a", "b"],
      [
        ["a", "a"],
        ["a", "ghost"],
        ["a", "b"],
      ],
      400,
      400,
    );
    expect(positions.size).toBe(2);
  });
});
