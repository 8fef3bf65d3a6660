/** Display formatting shared by the textual views. */

export function formatScore(score: number): string {
  return score.toFixed(6);
}

export function formatVector(vec: number[], maxComponents = 15): string {
  const shown = vec.slice(0, maxComponents).map((v) => formatShort(v));
  return shown.join(", ") + (vec.length > maxComponents ? ", …" : "");
}

function formatShort(v: number): string {
  return String(Number(v.toPrecision(6)));
}

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}
