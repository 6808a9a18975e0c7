// Deterministic force-directed layout. No Math.random: positions derive
// from a seeded generator so the same graph always lands the same way.

export interface Point {
  x: number;
  y: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function layoutGraph(
  names: string[],
  edges: [string, string][],
  width: number,
  height: number,
  iterations = 250,
  seed = 42,
): Map<string, Point> {
  const n = names.length;
  const positions = new Map<string, Point>();
  if (n === 0) {
    return positions;
  }
  const rand = mulberry32(seed);
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 3;
  names.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / n;
    positions.set(name, {
      x: cx + radius * Math.cos(angle) + (rand() - 0.5) * 20,
      y: cy + radius * Math.sin(angle) + (rand() - 0.5) * 20,
    });
  });
  if (n === 1) {
    positions.set(names[0], { x: cx, y: cy });
    return positions;
  }

  const index = new Map(names.map((name, i) => [name, i]));
  const xs = names.map((name) => positions.get(name)!.x);
  const ys = names.map((name) => positions.get(name)!.y);
  const edgePairs = edges
    .filter(([a, b]) => a !== b && index.has(a) && index.has(b))
    .map(([a, b]) => [index.get(a)!, index.get(b)!] as const);

  const springLength = Math.min(width, height) / Math.max(3, Math.sqrt(n));
  const repulsion = springLength * springLength;

  for (let step = 0; step < iterations; step++) {
    const cooling = 1 - step / iterations;
    const fx = new Array<number>(n).fill(0);
    const fy = new Array<number>(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        let dist2 = dx * dx + dy * dy;
        if (dist2 < 1e-6) {
          dx = 0.1 * (i - j);
          dy = 0.1;
          dist2 = dx * dx + dy * dy;
        }
        const force = repulsion / dist2;
        fx[i] += dx * force * 0.02;
        fy[i] += dy * force * 0.02;
        fx[j] -= dx * force * 0.02;
        fy[j] -= dy * force * 0.02;
      }
    }
    for (const [a, b] of edgePairs) {
      const dx = xs[b] - xs[a];
      const dy = ys[b] - ys[a];
      const dist = Math.sqrt(dx * dx + dy * dy) || 1;
      const pull = ((dist - springLength) / dist) * 0.05;
      fx[a] += dx * pull;
      fy[a] += dy * pull;
      fx[b] -= dx * pull;
      fy[b] -= dy * pull;
    }
    for (let i = 0; i < n; i++) {
      // gentle centering keeps disconnected pieces on screen
      fx[i] += (cx - xs[i]) * 0.005;
      fy[i] += (cy - ys[i]) * 0.005;
      xs[i] += fx[i] * cooling;
      ys[i] += fy[i] * cooling;
    }
  }

  const margin = 30;
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const scaleX = (width - 2 * margin) / Math.max(1, maxX - minX);
  const scaleY = (height - 2 * margin) / Math.max(1, maxY - minY);
  const scale = Math.min(1, scaleX, scaleY);
  names.forEach((name, i) => {
    positions.set(name, {
      x: margin + (xs[i] - minX) * scale,
      y: margin + (ys[i] - minY) * scale,
    });
  });
  return positions;
}
