/** Scribble hit-testing and suggestion ranking.
 *
 * The ranking must agree exactly with the server's /suggest endpoint:
 * nodes sorted by IoU with the touched set (descending), then leaf count
 * (ascending), then node id. All comparisons use plain IEEE doubles so the
 * two implementations cannot drift.
 */

import { ClientTree } from "./tree.js";

export type Point = [number, number];

export interface DocPathJson {
    index: number;
    closed: boolean;
    fill: number[] | null;
    stroke: number[] | null;
    stroke_width: number;
    fill_opacity: number;
    polyline: Point[];
}

export interface DocJson {
    canvas: { w: number; h: number };
    paths: DocPathJson[];
}

export function bboxOf(polyline: Point[]): [number, number, number, number] {
    let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
    for (const [x, y] of polyline) {
        if (x < minX) minX = x;
        if (y < minY) minY = y;
        if (x > maxX) maxX = x;
        if (y > maxY) maxY = y;
    }
    return [minX, minY, maxX, maxY];
}

/** Squared distance from p to segment ab (squared to keep both
 * implementations on exactly-rounded mul/add, avoiding hypot variance). */
export function segmentDistSq(p: Point, a: Point, b: Point): number {
    const dx = b[0] - a[0];
    const dy = b[1] - a[1];
    const l2 = dx * dx + dy * dy;
    let t = l2 === 0 ? 0 : ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2;
    if (t < 0) t = 0;
    else if (t > 1) t = 1;
    const qx = a[0] + t * dx;
    const qy = a[1] + t * dy;
    return (p[0] - qx) * (p[0] - qx) + (p[1] - qy) * (p[1] - qy);
}

/** Even-odd ray cast. */
export function pointInPolygon(p: Point, polyline: Point[]): boolean {
    let inside = false;
    const n = polyline.length;
    for (let i = 0, j = n - 1; i < n; j = i++) {
        const xi = polyline[i][0], yi = polyline[i][1];
        const xj = polyline[j][0], yj = polyline[j][1];
        if (yi > p[1] !== yj > p[1]
            && p[0] < ((xj - xi) * (p[1] - yi)) / (yj - yi) + xi) {
            inside = !inside;
        }
    }
    return inside;
}

function nearPolyline(p: Point, path: DocPathJson, epsSq: number): boolean {
    const poly = path.polyline;
    for (let i = 0; i + 1 < poly.length; i++) {
        if (segmentDistSq(p, poly[i], poly[i + 1]) <= epsSq) return true;
    }
    if (path.closed && poly.length > 2
        && segmentDistSq(p, poly[poly.length - 1], poly[0]) <= epsSq) {
        return true;
    }
    return false;
}

/** A point touches a path if it falls within the path's bbox (grown by eps,
 * so hairline shapes stay strokable) and is either within eps of the
 * polyline or inside the path's fill region. */
export function pointTouches(p: Point, path: DocPathJson, eps: number): boolean {
    const [minX, minY, maxX, maxY] = bboxOf(path.polyline);
    if (p[0] < minX - eps || p[0] > maxX + eps || p[1] < minY - eps || p[1] > maxY + eps) {
        return false;
    }
    if (nearPolyline(p, path, eps * eps)) return true;
    return path.closed && path.fill !== null && pointInPolygon(p, path.polyline);
}

/** Paths touched by a pointer trace; eps defaults to 1% of the canvas. */
export function hitTest(doc: DocJson, trace: Point[], eps?: number): Set<number> {
    const e = eps ?? 0.01 * Math.max(doc.canvas.w, doc.canvas.h);
    const touched = new Set<number>();
    for (const path of doc.paths) {
        for (const p of trace) {
            if (pointTouches(p, path, e)) {
                touched.add(path.index);
                break;
            }
        }
    }
    return touched;
}

export function iou(a: Set<number>, b: Set<number>): number {
    let inter = 0;
    for (const x of a) if (b.has(x)) inter += 1;
    const union = a.size + b.size - inter;
    return union === 0 ? 0 : inter / union;
}

/** Rank all tree nodes for a touched path set; identical to server /suggest. */
export function rankSuggestions(
    tree: ClientTree,
    touched: Set<number>,
    k = 3,
): number[] {
    if (touched.size === 0) throw new Error("scribble touched no paths");
    if (k < 1) throw new Error("k must be >= 1");
    const key = new Map<number, [number, number]>();
    for (const id of tree.nodeIds) {
        const leaves = tree.leavesOf(id);
        key.set(id, [iou(leaves, touched), leaves.size]);
    }
    const ranked = [...tree.nodeIds].sort((p, q) => {
        const [ip, np] = key.get(p)!;
        const [iq, nq] = key.get(q)!;
        if (ip !== iq) return iq - ip;
        if (np !== nq) return np - nq;
        return p - q;
    });
    return ranked.slice(0, Math.min(k, ranked.length));
}
