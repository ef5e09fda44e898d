import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import { ApiClient } from "../src/api.js";
import { DocJson, rankSuggestions } from "../src/scribble.js";
import { ClientTree, TreeJson } from "../src/tree.js";

// Vitest runs with the package root as cwd; fixtures live alongside src/.
export function loadJson<T>(relative: string): T {
    const path = resolve(process.cwd(), "fixtures", relative);
    return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export function loadFixture(name: string): { doc: DocJson; treeJson: TreeJson; tree: ClientTree } {
    const doc = loadJson<DocJson>(`${name}/doc.json`);
    const treeJson = loadJson<TreeJson>(`${name}/tree.json`);
    return { doc, treeJson, tree: new ClientTree(treeJson) };
}

export interface TraceFixture {
    fixture: string;
    trace: [number, number][];
    touched: number[];
    expected: number[];
}

export interface FaceMeta {
    face_group: number[];
    eye_path: number;
    other_group: number[];
}

/** Offline ApiClient backed by fixture files (suggest uses the client
 * ranking, which the agreement suite pins to the server's). */
export function fixtureApi(name: string): ApiClient {
    const { doc, treeJson, tree } = loadFixture(name);
    return {
        listGraphics: async () => [name],
        fetchSvgText: async () => {
            throw new Error("not available in fixtures");
        },
        fetchDoc: async () => doc,
        fetchTree: async () => treeJson,
        fetchSuggest: async (_gid, paths, k = 3) =>
            rankSuggestions(tree, new Set(paths), k),
        upload: async () => {
            throw new Error("not available in fixtures");
        },
    };
}

export function setEq(a: Set<number>, b: Set<number> | number[]): boolean {
    const bs = b instanceof Set ? b : new Set(b);
    if (a.size !== bs.size) return false;
    for (const x of a) if (!bs.has(x)) return false;
    return true;
}
