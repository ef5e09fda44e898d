/** Automated browser-level checks: real DOM events in, highlight classes out. */

import { beforeEach, describe, expect, it } from "vitest";

import { SelectApp } from "../src/app.js";
import { highlightedInDom } from "../src/render.js";
import { FaceMeta, fixtureApi, loadFixture, loadJson, setEq } from "./helpers.js";

function pointerDownOn(el: Element): void {
    el.dispatchEvent(new MouseEvent("pointerdown", { bubbles: true }));
}

function pathEl(app: SelectApp, index: number): Element {
    const el = app.svg.querySelector(`.vg-path[data-path-index="${index}"]`);
    if (el === null) throw new Error(`no rendered path ${index}`);
    return el;
}

describe("toggle correctness in the DOM", () => {
    let app: SelectApp;
    const { tree } = loadFixture("fix0");

    beforeEach(async () => {
        document.body.innerHTML = `<main id="app"></main>`;
        app = new SelectApp(document.getElementById("app")!, fixtureApi("fix0"));
        await app.loadGraphic("fix0");
    });

    it("renders one element per path", () => {
        expect(app.svg.querySelectorAll(".vg-path").length).toBe(app.doc!.paths.length);
        expect(highlightedInDom(app.svg).size).toBe(0);
    });

    it("click + k plus presses highlight the k-th ancestor's leaves", () => {
        const path = 2;
        const chain = tree.ancestors(tree.leafForPath(path));
        pointerDownOn(pathEl(app, path));
        for (let k = 0; k < chain.length; k++) {
            expect(setEq(highlightedInDom(app.svg), tree.leavesOf(chain[k]))).toBe(true);
            if (k + 1 < chain.length) app.plusBtn.click();
        }
        expect(app.plusBtn.disabled).toBe(true); // at root
    });

    it("minus presses reverse the exact anchor sequence", () => {
        pointerDownOn(pathEl(app, 6));
        const seen: Set<number>[] = [highlightedInDom(app.svg)];
        while (!app.plusBtn.disabled) {
            app.plusBtn.click();
            seen.push(highlightedInDom(app.svg));
        }
        for (let i = seen.length - 2; i >= 0; i--) {
            expect(app.minusBtn.disabled).toBe(false);
            app.minusBtn.click();
            expect(setEq(highlightedInDom(app.svg), seen[i])).toBe(true);
        }
        expect(app.minusBtn.disabled).toBe(true);
    });

    it("clicking empty canvas clears selection and hides traversal", () => {
        pointerDownOn(pathEl(app, 0));
        expect(highlightedInDom(app.svg).size).toBe(1);
        pointerDownOn(app.svg);
        expect(highlightedInDom(app.svg).size).toBe(0);
        expect(app.plusBtn.disabled).toBe(true);
        expect(app.minusBtn.disabled).toBe(true);
    });

    it("highlight always equals leavesOf(anchor) across random interaction", () => {
        const paths = app.doc!.paths.map((p) => p.index);
        let rngState = 12345;
        const rand = () => {
            rngState = (rngState * 1103515245 + 12345) % 2147483648;
            return rngState / 2147483648;
        };
        for (let step = 0; step < 200; step++) {
            const roll = rand();
            if (roll < 0.4) {
                pointerDownOn(pathEl(app, paths[Math.floor(rand() * paths.length)]));
            } else if (roll < 0.7 && !app.plusBtn.disabled) {
                app.plusBtn.click();
            } else if (roll < 0.9 && !app.minusBtn.disabled) {
                app.minusBtn.click();
            } else {
                pointerDownOn(app.svg);
            }
            const expected =
                app.state.anchor === null
                    ? new Set<number>()
                    : tree.leavesOf(app.state.anchor);
            expect(setEq(highlightedInDom(app.svg), expected)).toBe(true);
        }
    });

    it("walks from an eye to the whole face without crossing motifs", () => {
        const meta = loadJson<Record<string, FaceMeta>>("meta.json").fix0;
        const face = new Set(meta.face_group);
        pointerDownOn(pathEl(app, meta.eye_path));
        let sel = highlightedInDom(app.svg);
        let presses = 0;
        while (!setEq(sel, face)) {
            for (const p of sel) expect(face.has(p)).toBe(true); // never leaves the face
            expect(app.plusBtn.disabled).toBe(false);
            app.plusBtn.click();
            presses += 1;
            sel = highlightedInDom(app.svg);
        }
        expect(setEq(sel, face)).toBe(true);
        expect(presses).toBeGreaterThan(0);
        for (const other of meta.other_group) {
            expect(sel.has(other)).toBe(false);
        }
    });
});
