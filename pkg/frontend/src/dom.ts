// Tiny DOM helpers; no framework.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(typeof child === "string" ? document.createTextNode(child) : child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function toast(message: string): void {
  const box = el("div", { class: "toast" }, message);
  document.body.append(box);
  setTimeout(() => box.remove(), 4000);
}

export function likertRow(
  name: string,
  onPick: (value: number) => void,
): HTMLElement {
  const row = el("div", { class: "likert", "data-name": name });
  for (let value = 1; value <= 7; value++) {
    const label = el("label", {}, String(value));
    const input = el("input", { type: "radio", name, value: String(value) });
    input.addEventListener("change", () => onPick(value));
    label.prepend(input);
    row.append(label);
  }
  return row;
}
