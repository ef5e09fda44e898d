/** Application shell: DOM construction, event wiring, state/DOM sync. */

import { ApiClient } from "./api.js";
import {
    applyHighlight,
    clearTrace,
    renderDocument,
    renderTrace,
} from "./render.js";
import { DocJson, Point, hitTest, rankSuggestions } from "./scribble.js";
import {
    Mode,
    SelectionState,
    canMinus,
    canPlus,
    clearSelection,
    clickPath,
    highlighted,
    initialState,
    pickSuggestion,
    setMode,
    toggleMinus,
    togglePlus,
} from "./selection.js";
import { ClientTree } from "./tree.js";

export class SelectApp {
    state: SelectionState;
    tree: ClientTree | null = null;
    doc: DocJson | null = null;

    readonly svg: SVGSVGElement;
    readonly plusBtn: HTMLButtonElement;
    readonly minusBtn: HTMLButtonElement;
    readonly toggleModeBtn: HTMLButtonElement;
    readonly scribbleModeBtn: HTMLButtonElement;
    readonly suggestionsEl: HTMLElement;
    readonly statusEl: HTMLElement;

    private trace: Point[] = [];
    private drawing = false;

    constructor(root: HTMLElement, private readonly api: ApiClient) {
        this.state = initialState("");
        root.innerHTML = `
          <div class="toolbar">
            <button class="mode-toggle" type="button">Toggle</button>
            <button class="mode-scribble" type="button">Scribble</button>
            <span class="spacer"></span>
            <button class="btn-plus" type="button" title="select parent group">+</button>
            <button class="btn-minus" type="button" title="step back down">−</button>
            <span class="status"></span>
          </div>
          <div class="stage"><svg class="vg-canvas"></svg></div>
          <div class="suggestions"></div>`;
        this.svg = root.querySelector<SVGSVGElement>("svg.vg-canvas")!;
        this.plusBtn = root.querySelector<HTMLButtonElement>(".btn-plus")!;
        this.minusBtn = root.querySelector<HTMLButtonElement>(".btn-minus")!;
        this.toggleModeBtn = root.querySelector<HTMLButtonElement>(".mode-toggle")!;
        this.scribbleModeBtn = root.querySelector<HTMLButtonElement>(".mode-scribble")!;
        this.suggestionsEl = root.querySelector<HTMLElement>(".suggestions")!;
        this.statusEl = root.querySelector<HTMLElement>(".status")!;

        this.plusBtn.addEventListener("click", () => this.pressPlus());
        this.minusBtn.addEventListener("click", () => this.pressMinus());
        this.toggleModeBtn.addEventListener("click", () => this.switchMode("toggle"));
        this.scribbleModeBtn.addEventListener("click", () => this.switchMode("scribble"));

        this.svg.addEventListener("pointerdown", (ev) => this.onPointerDown(ev));
        this.svg.addEventListener("pointermove", (ev) => this.onPointerMove(ev));
        this.svg.addEventListener("pointerup", () => void this.onPointerUp());
        this.sync();
    }

    async loadGraphic(gid: string): Promise<void> {
        const [doc, treeJson] = await Promise.all([
            this.api.fetchDoc(gid),
            this.api.fetchTree(gid),
        ]);
        this.doc = doc;
        this.tree = new ClientTree(treeJson);
        this.state = initialState(gid);
        renderDocument(this.svg, doc);
        this.suggestionsEl.innerHTML = "";
        this.sync();
    }

    // -- toggle interactions ------------------------------------------------

    handleClickPath(path: number): void {
        if (this.tree === null) return;
        this.state = clickPath(this.state, this.tree, path);
        this.sync();
    }

    handleClickOutside(): void {
        this.state = clearSelection(this.state);
        this.sync();
    }

    pressPlus(): void {
        if (this.tree === null) return;
        this.state = togglePlus(this.state, this.tree);
        this.sync();
    }

    pressMinus(): void {
        this.state = toggleMinus(this.state);
        this.sync();
    }

    switchMode(mode: Mode): void {
        this.state = setMode(this.state, mode);
        this.suggestionsEl.innerHTML = "";
        this.sync();
    }

    // -- scribble interactions ----------------------------------------------

    private canvasPoint(ev: PointerEvent): Point {
        const rect = this.svg.getBoundingClientRect();
        if (this.doc === null || rect.width === 0 || rect.height === 0) {
            return [ev.clientX, ev.clientY];
        }
        return [
            ((ev.clientX - rect.left) / rect.width) * this.doc.canvas.w,
            ((ev.clientY - rect.top) / rect.height) * this.doc.canvas.h,
        ];
    }

    private onPointerDown(ev: PointerEvent): void {
        if (this.state.mode === "scribble") {
            this.drawing = true;
            this.trace = [this.canvasPoint(ev)];
            renderTrace(this.svg, this.trace);
            return;
        }
        const target = ev.target as Element | null;
        const pathEl = target?.closest?.(".vg-path") as SVGPathElement | null;
        if (pathEl?.dataset.pathIndex !== undefined) {
            this.handleClickPath(Number(pathEl.dataset.pathIndex));
        } else {
            this.handleClickOutside();
        }
    }

    private onPointerMove(ev: PointerEvent): void {
        if (!this.drawing) return;
        this.trace.push(this.canvasPoint(ev));
        renderTrace(this.svg, this.trace);
    }

    private async onPointerUp(): Promise<void> {
        if (!this.drawing) return;
        this.drawing = false;
        const trace = this.trace;
        this.trace = [];
        clearTrace(this.svg);
        await this.runScribble(trace);
    }

    /** Hit-test a trace and present ranked suggestions; empty traces no-op.
     * The server ranking is preferred when reachable, but the client ranking
     * is identical by contract and serves as the offline fallback. */
    async runScribble(trace: Point[]): Promise<number[]> {
        if (this.doc === null || this.tree === null) return [];
        const touched = hitTest(this.doc, trace);
        this.state = { ...this.state, touched };
        if (touched.size === 0) return [];
        const local = rankSuggestions(this.tree, touched, 3);
        let ranked = local;
        try {
            ranked = await this.api.fetchSuggest(this.state.graphicId, [...touched].sort((a, b) => a - b), 3);
        } catch {
            ranked = local;
        }
        this.renderSuggestions(ranked);
        return ranked;
    }

    private renderSuggestions(ranked: number[]): void {
        this.suggestionsEl.innerHTML = "";
        for (const nodeId of ranked) {
            const btn = document.createElement("button");
            btn.type = "button";
            btn.className = "suggestion";
            btn.dataset.nodeId = String(nodeId);
            const n = this.tree ? this.tree.leavesOf(nodeId).size : 0;
            btn.textContent = `group ${nodeId} (${n} path${n === 1 ? "" : "s"})`;
            btn.addEventListener("click", () => this.choose(nodeId));
            this.suggestionsEl.appendChild(btn);
        }
    }

    choose(nodeId: number): void {
        this.state = pickSuggestion(this.state, nodeId);
        this.suggestionsEl.innerHTML = "";
        this.sync();
    }

    // -- state -> DOM --------------------------------------------------------

    private sync(): void {
        applyHighlight(this.svg, highlighted(this.state, this.tree));
        this.plusBtn.disabled = this.tree === null || !canPlus(this.state, this.tree);
        this.minusBtn.disabled = !canMinus(this.state);
        this.toggleModeBtn.classList.toggle("active", this.state.mode === "toggle");
        this.scribbleModeBtn.classList.toggle("active", this.state.mode === "scribble");
        const sel = highlighted(this.state, this.tree);
        this.statusEl.textContent =
            this.state.anchor === null
                ? "nothing selected"
                : `node ${this.state.anchor}: ${sel.size} path${sel.size === 1 ? "" : "s"}`;
    }
}
