/** Client-side grouping tree mirroring the server's tree.json contract. */

export interface TreeNodeJson {
    id: number;
    path?: number;
    children?: number[];
}

export interface TreeJson {
    nodes: TreeNodeJson[];
    root: number;
}

export class ClientTree {
    readonly root: number;
    /** All node ids, ascending. */
    readonly nodeIds: number[];

    private readonly parents = new Map<number, number>();
    private readonly childrenOf = new Map<number, number[]>();
    private readonly leafSets = new Map<number, Set<number>>();
    private readonly pathLeaf = new Map<number, number>();

    constructor(json: TreeJson) {
        this.root = json.root;
        const byId = new Map<number, TreeNodeJson>();
        for (const node of json.nodes) {
            if (byId.has(node.id)) throw new Error(`duplicate node id ${node.id}`);
            byId.set(node.id, node);
        }
        if (!byId.has(json.root)) throw new Error(`root ${json.root} not in nodes`);
        this.nodeIds = [...byId.keys()].sort((a, b) => a - b);

        for (const node of byId.values()) {
            if (node.children !== undefined) {
                this.childrenOf.set(node.id, [...node.children]);
                for (const c of node.children) {
                    if (!byId.has(c)) throw new Error(`unknown child ${c}`);
                    this.parents.set(c, node.id);
                }
            } else if (node.path !== undefined) {
                this.pathLeaf.set(node.path, node.id);
            } else {
                throw new Error(`node ${node.id} has neither path nor children`);
            }
        }

        const fill = (id: number): Set<number> => {
            const cached = this.leafSets.get(id);
            if (cached) return cached;
            const node = byId.get(id)!;
            const leaves = new Set<number>();
            if (node.children !== undefined) {
                for (const c of node.children) for (const p of fill(c)) leaves.add(p);
            } else {
                leaves.add(node.path!);
            }
            this.leafSets.set(id, leaves);
            return leaves;
        };
        for (const id of this.nodeIds) fill(id);
    }

    isLeaf(id: number): boolean {
        return !this.childrenOf.has(id);
    }

    children(id: number): number[] {
        return this.childrenOf.get(id) ?? [];
    }

    parent(id: number): number | null {
        return this.parents.has(id) ? this.parents.get(id)! : null;
    }

    /** Path indices under a node (do not mutate the returned set). */
    leavesOf(id: number): Set<number> {
        const leaves = this.leafSets.get(id);
        if (!leaves) throw new Error(`unknown node ${id}`);
        return leaves;
    }

    leafForPath(path: number): number {
        const leaf = this.pathLeaf.get(path);
        if (leaf === undefined) throw new Error(`no leaf for path ${path}`);
        return leaf;
    }

    /** Ancestor chain from the node itself up to the root, inclusive. */
    ancestors(id: number): number[] {
        const chain = [id];
        let cur: number | null = id;
        while ((cur = this.parent(cur)) !== null) chain.push(cur);
        return chain;
    }

    get nPaths(): number {
        return this.pathLeaf.size;
    }
}
