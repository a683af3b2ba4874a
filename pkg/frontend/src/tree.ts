/** Case-tree view model: a snapshot reducer fed by trace events.
 *
 * The model starts from a tree snapshot (or from the bare root for a fresh
 * session) and applies trace lines one at a time.  Structure and statuses
 * are fully determined by the event stream; per-case statistics (term and
 * equation counts) only come from snapshots, so any event touching a case
 * marks its stats stale until the next snapshot or case fetch refreshes
 * them.  The rendering layer shows stale rows with an explicit marker
 * instead of guessing numbers.
 */

import { branchChildren, parseTraceLine } from "./trace.js";
import type { FamilyDetail, TreeCaseRow, TreeResponse } from "./types.js";

export const AWAITING = "awaiting-interaction";

export interface TreeNode {
  id: string;
  parent: string | null;
  status: string;
  note: string;
  children: string[];
  explore: boolean;
  equations: number | null;
  terms: number | null;
  maxTerms: number | null;
  lastModule: string | null;
  statsFresh: boolean;
}

export interface RunStats {
  visited: number;
  families: number;
  cases: number;
}

export interface StructuralView {
  cases: { id: string; parent: string | null; status: string; children: string[] }[];
  families: string[];
}

function blankNode(id: string, parent: string | null): TreeNode {
  return {
    id,
    parent,
    status: "open",
    note: "",
    children: [],
    explore: true,
    equations: null,
    terms: null,
    maxTerms: null,
    lastModule: null,
    statsFresh: false,
  };
}

export class TreeModel {
  readonly nodes = new Map<string, TreeNode>();
  families: string[] = [];
  familyDetails: FamilyDetail[] = [];
  version = 0;
  snapshotVersion = 0;
  lastRun: RunStats | null = null;
  running = false;

  /** Fresh-session model: the root case exists before any event. */
  static initial(): TreeModel {
    const model = new TreeModel();
    model.nodes.set("1", blankNode("1", null));
    return model;
  }

  static fromSnapshot(tree: TreeResponse): TreeModel {
    const model = new TreeModel();
    model.loadSnapshot(tree);
    return model;
  }

  /** Replace structure and statistics with a server snapshot. */
  loadSnapshot(tree: TreeResponse): void {
    this.nodes.clear();
    for (const row of tree.cases) {
      this.nodes.set(row.id, snapshotNode(row));
    }
    this.families = [...tree.summary.families];
    this.familyDetails = [...tree.families];
    this.version = tree.version;
    this.snapshotVersion = tree.version;
  }

  private upsert(id: string, parent: string | null): TreeNode {
    let node = this.nodes.get(id);
    if (node === undefined) {
      node = blankNode(id, parent);
      this.nodes.set(id, node);
      if (parent !== null) {
        const up = this.upsert(parent, null);
        if (!up.children.includes(id)) {
          up.children.push(id);
        }
      }
    }
    return node;
  }

  /** Apply one trace line; unknown lines still advance the cursor. */
  applyEventLine(line: string): void {
    this.version += 1;
    const event = parseTraceLine(line);
    if (event === null) {
      return;
    }
    const caseId = event.fields["case"];
    switch (event.kind) {
      case "status": {
        if (caseId === undefined) break;
        const node = this.upsert(caseId, parentOf(caseId));
        node.status = event.fields["status"] ?? node.status;
        node.note = event.fields["note"] ?? "";
        node.statsFresh = false;
        break;
      }
      case "branch": {
        if (caseId === undefined) break;
        const node = this.upsert(caseId, parentOf(caseId));
        node.status = "branched";
        node.note = event.fields["note"] ?? "";
        node.statsFresh = false;
        for (const child of branchChildren(event)) {
          const kid = this.upsert(child, caseId);
          kid.parent = caseId;
          if (!node.children.includes(child)) {
            node.children.push(child);
          }
        }
        break;
      }
      case "step": {
        if (caseId === undefined) break;
        const node = this.upsert(caseId, parentOf(caseId));
        node.lastModule = event.fields["module"] ?? null;
        node.statsFresh = false;
        // Module 38 parks the case for interaction; that transition has no
        // separate status line, the step itself is the evidence.
        if (node.lastModule === "38") {
          node.status = AWAITING;
        }
        break;
      }
      case "solution": {
        const family = event.fields["family"];
        if (event.fields["new"] === "yes" && family !== undefined && !this.families.includes(family)) {
          this.families.push(family);
        }
        break;
      }
      case "run": {
        this.lastRun = {
          visited: int(event.fields["visited"]),
          families: int(event.fields["families"]),
          cases: int(event.fields["cases"]),
        };
        this.running = false;
        break;
      }
      case "limit":
      case "skip":
        break;
    }
  }

  /** The fields of the view that the event stream determines exactly. */
  structuralView(): StructuralView {
    const ids = [...this.nodes.keys()].sort();
    return {
      cases: ids.map((id) => {
        const node = this.nodes.get(id)!;
        return { id, parent: node.parent, status: node.status, children: [...node.children] };
      }),
      families: [...this.families],
    };
  }

  statusCounts(): Record<string, number> {
    const counts: Record<string, number> = {};
    for (const node of this.nodes.values()) {
      counts[node.status] = (counts[node.status] ?? 0) + 1;
    }
    return counts;
  }

  /** Depth-first outline in birth order, with nesting depth for rendering. */
  outline(): { node: TreeNode; depth: number }[] {
    const out: { node: TreeNode; depth: number }[] = [];
    const walk = (id: string, depth: number): void => {
      const node = this.nodes.get(id);
      if (node === undefined) return;
      out.push({ node, depth });
      for (const child of node.children) {
        walk(child, depth + 1);
      }
    };
    if (this.nodes.has("1")) {
      walk("1", 0);
    }
    return out;
  }
}

function snapshotNode(row: TreeCaseRow): TreeNode {
  return {
    id: row.id,
    parent: row.parent,
    status: row.status,
    note: row.note,
    children: [...row.children],
    explore: row.explore,
    equations: row.equations,
    terms: row.terms,
    maxTerms: row.max_terms,
    lastModule: null,
    statsFresh: true,
  };
}

export function structuralViewOfSnapshot(tree: TreeResponse): StructuralView {
  const rows = [...tree.cases].sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  return {
    cases: rows.map((row) => ({
      id: row.id,
      parent: row.parent,
      status: row.status,
      children: [...row.children],
    })),
    families: [...tree.summary.families],
  };
}

function parentOf(id: string): string | null {
  const dot = id.lastIndexOf(".");
  return dot < 0 ? null : id.slice(0, dot);
}

function int(raw: string | undefined): number {
  return raw === undefined ? 0 : Number.parseInt(raw, 10);
}
