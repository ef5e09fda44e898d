/** Typed client for the grouping service endpoints. */

import { DocJson } from "./scribble.js";
import { TreeJson } from "./tree.js";

export interface ApiClient {
    listGraphics(): Promise<string[]>;
    fetchSvgText(gid: string): Promise<string>;
    fetchDoc(gid: string): Promise<DocJson>;
    fetchTree(gid: string, containment?: boolean): Promise<TreeJson>;
    fetchSuggest(gid: string, paths: number[], k?: number): Promise<number[]>;
    upload(file: File): Promise<string>;
}

async function ok(res: Response): Promise<Response> {
    if (!res.ok) {
        let detail = res.statusText;
        try {
            const body = await res.json();
            if (body && typeof body.detail === "string") detail = body.detail;
        } catch {
            /* keep statusText */
        }
        throw new Error(`${res.status}: ${detail}`);
    }
    return res;
}

export function createApi(baseUrl = ""): ApiClient {
    const url = (path: string) => `${baseUrl}${path}`;
    return {
        async listGraphics() {
            return (await ok(await fetch(url("/api/graphics")))).json();
        },
        async fetchSvgText(gid) {
            return (await ok(await fetch(url(`/api/graphics/${gid}/svg`)))).text();
        },
        async fetchDoc(gid) {
            return (await ok(await fetch(url(`/api/graphics/${gid}/doc`)))).json();
        },
        async fetchTree(gid, containment = false) {
            const q = containment ? "?containment=true" : "";
            return (await ok(await fetch(url(`/api/graphics/${gid}/tree${q}`)))).json();
        },
        async fetchSuggest(gid, paths, k = 3) {
            const q = `paths=${paths.join(",")}&k=${k}`;
            return (await ok(await fetch(url(`/api/graphics/${gid}/suggest?${q}`)))).json();
        },
        async upload(file) {
            const form = new FormData();
            form.append("file", file);
            const res = await ok(
                await fetch(url("/api/graphics"), { method: "POST", body: form }),
            );
            return (await res.json()).id;
        },
    };
}
