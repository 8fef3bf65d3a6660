/** Small deterministic force-directed layout (repulsion + springs + centering).
 * Desk-scale graphs only; keeps the browser build free of runtime deps. */

export interface LayoutNode {
  id: string;
  x: number;
  y: number;
}

export interface LayoutEdge {
  source: string;
  target: string;
  weight: number; // cosine in [-1, 1]; higher pulls nodes closer
}

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  seed?: number;
  /** pin starting positions for nodes already on screen */
  initial?: Map<string, { x: number; y: number }>;
}

// mulberry32: tiny seeded PRNG so layouts are reproducible in tests
function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  ids: string[],
  edges: LayoutEdge[],
  opts: LayoutOptions,
): LayoutNode[] {
  const { width, height } = opts;
  const iterations = opts.iterations ?? 120;
  const random = rng(opts.seed ?? 7);
  const index = new Map(ids.map((id, i) => [id, i]));
  const n = ids.length;
  const x = new Float64Array(n);
  const y = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const pinned = opts.initial?.get(ids[i]);
    x[i] = pinned ? pinned.x : width / 2 + (random() - 0.5) * width * 0.5;
    y[i] = pinned ? pinned.y : height / 2 + (random() - 0.5) * height * 0.5;
  }
  const links = edges
    .filter((e) => index.has(e.source) && index.has(e.target))
    .map((e) => ({
      s: index.get(e.source)!,
      t: index.get(e.target)!,
      rest: 40 + 100 * (1 - Math.max(0, e.weight)),
    }));

  const repulsion = 4000;
  const spring = 0.02;
  const gravity = 0.01;
  for (let it = 0; it < iterations; it++) {
    const cool = 1 - it / iterations;
    for (let i = 0; i < n; i++) {
      let fx = 0;
      let fy = 0;
      for (let j = 0; j < n; j++) {
        if (i === j) continue;
        let dx = x[i] - x[j];
        let dy = y[i] - y[j];
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-4) {
          dx = (random() - 0.5) * 0.1;
          dy = (random() - 0.5) * 0.1;
          d2 = dx * dx + dy * dy;
        }
        const f = repulsion / d2;
        const d = Math.sqrt(d2);
        fx += (dx / d) * f;
        fy += (dy / d) * f;
      }
      fx += (width / 2 - x[i]) * gravity;
      fy += (height / 2 - y[i]) * gravity;
      for (const link of links) {
        if (link.s !== i && link.t !== i) continue;
        const o = link.s === i ? link.t : link.s;
        const dx = x[o] - x[i];
        const dy = y[o] - y[i];
        const d = Math.sqrt(dx * dx + dy * dy) || 1e-3;
        const f = spring * (d - link.rest);
        fx += (dx / d) * f;
        fy += (dy / d) * f;
      }
      x[i] += Math.max(-30, Math.min(30, fx)) * cool;
      y[i] += Math.max(-30, Math.min(30, fy)) * cool;
    }
  }
  return ids.map((id, i) => ({ id, x: x[i], y: y[i] }));
}
