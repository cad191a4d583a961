// Canvas drawing of the force layout.  Node colors key off the node type;
// several types may share a color, the mapping is not one-to-one.

import type { ForceSim } from "./force.js";

const PORT_KINDS = new Set(["in", "middle", "out"]);

const PALETTE: Record<string, string> = {
  L: "#2e7d32",
  A: "#c62828",
  FI: "#00695c",
  FO: "#558b2f",
  FOE: "#9e9d24",
  FOX: "#7cb342",
  D: "#5d4037",
  T: "#212121",
  FRIN: "#1565c0",
  FROUT: "#6a1b9a",
  FREE: "#455a64",
  Arrow: "#ef6c00",
  GAMMA: "#c62828",
  DELTA: "#1565c0",
  in: "#90a4ae",
  middle: "#b0bec5",
  out: "#78909c",
};

export function colorOf(type: string): string {
  return PALETTE[type] ?? "#616161";
}

export function isCenter(type: string): boolean {
  return !PORT_KINDS.has(type);
}

export function draw(ctx: CanvasRenderingContext2D, sim: ForceSim): void {
  ctx.clearRect(0, 0, sim.width, sim.height);
  ctx.lineWidth = 1;
  for (const spring of sim.springs) {
    const a = sim.bodies[spring.source];
    const b = sim.bodies[spring.target];
    if (!a || !b) continue;
    ctx.strokeStyle = spring.value === 2 ? "#bdbdbd" : "#546e7a";
    ctx.lineWidth = spring.value === 2 ? 1 : 1.8;
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  for (const body of sim.bodies) {
    const r = isCenter(body.type) ? 9 : 3.5;
    ctx.fillStyle = colorOf(body.type);
    ctx.beginPath();
    ctx.arc(body.x, body.y, r, 0, 2 * Math.PI);
    ctx.fill();
    if (isCenter(body.type)) {
      ctx.fillStyle = "#fff";
      ctx.font = "8px sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(body.type.slice(0, 3), body.x, body.y);
    }
  }
}

export function drawSparkline(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  series: [number, number][],
): void {
  ctx.clearRect(0, 0, width, height);
  if (series.length < 2) return;
  const maxNodes = Math.max(...series.map(([, n]) => n), 1);
  const maxStep = Math.max(...series.map(([s]) => s), 1);
  ctx.strokeStyle = "#2e7d32";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  series.forEach(([s, n], k) => {
    const x = (s / maxStep) * (width - 4) + 2;
    const y = height - 2 - (n / maxNodes) * (height - 6);
    if (k === 0) ctx.moveTo(x, y);
    else ctx.lineTo(x, y);
  });
  ctx.stroke();
}

export function drawHistogram(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  values: number[],
  bins = 20,
): void {
  ctx.clearRect(0, 0, width, height);
  if (!values.length) return;
  const hi = Math.max(...values, 1);
  const counts = new Array(bins).fill(0);
  for (const v of values) {
    counts[Math.min(bins - 1, Math.floor((v / hi) * bins))] += 1;
  }
  const top = Math.max(...counts, 1);
  const bw = width / bins;
  ctx.fillStyle = "#1565c0";
  counts.forEach((c, k) => {
    const h = (c / top) * (height - 4);
    ctx.fillRect(k * bw + 1, height - h, bw - 2, h);
  });
}
