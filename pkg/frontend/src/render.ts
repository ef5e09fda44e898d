/** SVG rendering of a parsed document and selection highlighting. */

import { DocJson, DocPathJson, Point } from "./scribble.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export function colorToCss(c: number[] | null, opacity = 1.0): string {
    if (c === null) return "none";
    const [r, g, b, a] = c;
    const alpha = (a ?? 1.0) * opacity;
    const to255 = (v: number) => Math.round(Math.max(0, Math.min(1, v)) * 255);
    return `rgba(${to255(r)},${to255(g)},${to255(b)},${alpha.toFixed(4)})`;
}

export function pathD(p: DocPathJson): string {
    if (p.polyline.length === 0) return "";
    const parts = [`M ${p.polyline[0][0]} ${p.polyline[0][1]}`];
    for (let i = 1; i < p.polyline.length; i++) {
        parts.push(`L ${p.polyline[i][0]} ${p.polyline[i][1]}`);
    }
    if (p.closed) parts.push("Z");
    return parts.join(" ");
}

/** Render all document paths as <path class="vg-path" data-path-index=…>. */
export function renderDocument(svg: SVGSVGElement, doc: DocJson): void {
    svg.setAttribute("viewBox", `0 0 ${doc.canvas.w} ${doc.canvas.h}`);
    while (svg.firstChild) svg.removeChild(svg.firstChild);
    for (const p of doc.paths) {
        const el = document.createElementNS(SVG_NS, "path");
        el.setAttribute("d", pathD(p));
        el.setAttribute("fill", colorToCss(p.fill, p.fill_opacity));
        el.setAttribute("stroke", p.stroke !== null ? colorToCss(p.stroke) : "none");
        if (p.stroke_width > 0) {
            el.setAttribute("stroke-width", String(p.stroke_width));
        }
        el.classList.add("vg-path");
        el.dataset.pathIndex = String(p.index);
        svg.appendChild(el);
    }
}

/** Make the DOM match the selection: exactly the given paths are .selected. */
export function applyHighlight(svg: SVGSVGElement, selected: Set<number>): void {
    for (const el of svg.querySelectorAll<SVGPathElement>(".vg-path")) {
        const idx = Number(el.dataset.pathIndex);
        el.classList.toggle("selected", selected.has(idx));
    }
}

/** Read the highlighted path set back out of the DOM. */
export function highlightedInDom(svg: SVGSVGElement): Set<number> {
    const out = new Set<number>();
    for (const el of svg.querySelectorAll<SVGPathElement>(".vg-path.selected")) {
        out.add(Number(el.dataset.pathIndex));
    }
    return out;
}

export function renderTrace(svg: SVGSVGElement, trace: Point[]): void {
    clearTrace(svg);
    if (trace.length === 0) return;
    const el = document.createElementNS(SVG_NS, "polyline");
    el.setAttribute("points", trace.map(([x, y]) => `${x},${y}`).join(" "));
    el.setAttribute("class", "vg-trace");
    el.setAttribute("fill", "none");
    svg.appendChild(el);
}

export function clearTrace(svg: SVGSVGElement): void {
    for (const el of svg.querySelectorAll(".vg-trace")) el.remove();
}
