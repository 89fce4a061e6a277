/** Tiny SVG/DOM helpers; everything above this layer is DOM-free. */
const SVG_NS = "http://www.w3.org/2000/svg";
export function svgElement(tag, attrs = {}) {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [key, value] of Object.entries(attrs)) {
        el.setAttribute(key, String(value));
    }
    return el;
}
export function clear(el) {
    while (el.firstChild)
        el.removeChild(el.firstChild);
}
export function toast(message, host, ms = 4000) {
    const node = document.createElement("div");
    node.className = "toast";
    node.textContent = message;
    host.appendChild(node);
    setTimeout(() => node.remove(), ms);
}
