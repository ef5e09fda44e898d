/** Selection state and its transitions (pure, DOM-free). */

import { ClientTree } from "./tree.js";

export type Mode = "toggle" | "scribble";

export interface SelectionState {
    graphicId: string;
    /** Current selection is leavesOf(anchor); null means nothing selected. */
    anchor: number | null;
    /** Anchors recorded by plus presses; minus pops to descend the way we came. */
    history: number[];
    mode: Mode;
    touched: Set<number>;
}

export function initialState(graphicId: string): SelectionState {
    return { graphicId, anchor: null, history: [], mode: "toggle", touched: new Set() };
}

/** Click a path: anchor at its leaf, with no traversal history yet. */
export function clickPath(
    state: SelectionState,
    tree: ClientTree,
    path: number,
): SelectionState {
    return { ...state, anchor: tree.leafForPath(path), history: [] };
}

/** Click outside any path: clear the selection. */
export function clearSelection(state: SelectionState): SelectionState {
    return { ...state, anchor: null, history: [] };
}

export function canPlus(state: SelectionState, tree: ClientTree): boolean {
    return state.anchor !== null && tree.parent(state.anchor) !== null;
}

/** Minus only retraces recorded descents; it is disabled without history. */
export function canMinus(state: SelectionState): boolean {
    return state.history.length > 0;
}

export function togglePlus(state: SelectionState, tree: ClientTree): SelectionState {
    if (!canPlus(state, tree)) return state;
    const parent = tree.parent(state.anchor!)!;
    return { ...state, anchor: parent, history: [...state.history, state.anchor!] };
}

export function toggleMinus(state: SelectionState): SelectionState {
    if (!canMinus(state)) return state;
    const history = [...state.history];
    const anchor = history.pop()!;
    return { ...state, anchor, history };
}

/** Picking a suggestion anchors there without a recorded descent. */
export function pickSuggestion(state: SelectionState, nodeId: number): SelectionState {
    return { ...state, anchor: nodeId, history: [] };
}

export function setMode(state: SelectionState, mode: Mode): SelectionState {
    return { ...state, mode, touched: new Set() };
}

/** The invariant surface: highlighted paths = leavesOf(anchor). */
export function highlighted(state: SelectionState, tree: ClientTree | null): Set<number> {
    if (state.anchor === null || tree === null) return new Set();
    return tree.leavesOf(state.anchor);
}
