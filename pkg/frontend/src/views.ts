/** Pure HTML renderers for the cockpit panels.
 *
 * Every function here maps model state to an HTML string; no fetches, no
 * algebra, no number crunching.  The app shell injects the strings and
 * wires events by data attributes.
 */

import type { PlayBoard } from "./board.js";
import { describeCandidate } from "./candidates.js";
import type { TreeModel, TreeNode } from "./tree.js";
import type { CaseDetail, CheckLine, FamilyDetail, PuzzleBody, SessionHandle } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const STATUS_CLASS: Record<string, string> = {
  open: "st-open",
  branched: "st-branched",
  solved: "st-solved",
  "no-rational-solution": "st-norat",
  contradictory: "st-contra",
  "resource-limit": "st-limit",
  "awaiting-interaction": "st-await",
};

export function statusBadge(status: string): string {
  const cls = STATUS_CLASS[status] ?? "st-other";
  return `<span class="badge ${cls}">${escapeHtml(status)}</span>`;
}

function nodeStats(node: TreeNode): string {
  if (!node.statsFresh) {
    return `<span class="stats stale" title="statistics are older than the latest events">stats stale</span>`;
  }
  const eq = node.equations ?? 0;
  const terms = node.terms ?? 0;
  const max = node.maxTerms ?? 0;
  return `<span class="stats">eq ${eq} &middot; terms ${terms} &middot; widest ${max}</span>`;
}

/** Collapsible outline of the case tree in birth order. */
export function renderTreeOutline(model: TreeModel, selected: string | null): string {
  const render = (id: string): string => {
    const node = model.nodes.get(id);
    if (node === undefined) {
      return "";
    }
    const mark = node.id === selected ? " selected" : "";
    const deferred = node.explore ? "" : `<span class="deferred">deferred</span>`;
    const head =
      `<span class="case-row${mark}" data-case="${escapeHtml(node.id)}">` +
      `<code class="case-id">${escapeHtml(node.id)}</code> ${statusBadge(node.status)} ` +
      `${deferred}${nodeStats(node)}` +
      (node.note === "" ? "" : ` <span class="note">${escapeHtml(node.note)}</span>`) +
      `</span>`;
    if (node.children.length === 0) {
      return `<li>${head}</li>`;
    }
    const kids = node.children.map(render).join("");
    return `<li><details open><summary>${head}</summary><ul class="subtree">${kids}</ul></details></li>`;
  };
  const body = model.nodes.has("1") ? render("1") : "";
  return `<ul class="tree">${body}</ul>`;
}

export function renderSummary(model: TreeModel, handle: SessionHandle | null): string {
  const counts = model.statusCounts();
  const parts = Object.keys(counts)
    .sort()
    .map((k) => `${statusBadge(k)} ${counts[k]}`)
    .join(" ");
  const run = model.lastRun === null ? "" : ` &middot; last run visited ${model.lastRun.visited}`;
  const state =
    handle === null ? "" : handle.running ? `<span class="running">running</span>` : `<span class="idle">idle</span>`;
  return (
    `<div class="summary">${state} <span>cases ${model.nodes.size}</span> ${parts}` +
    ` <span>families ${model.families.length}</span>` +
    ` <span class="version">version ${model.version}</span>${run}</div>`
  );
}

export function renderFamilies(families: FamilyDetail[]): string {
  if (families.length === 0) {
    return `<p class="empty">no solution families yet</p>`;
  }
  const rows = families
    .map((fam) => {
      const free = fam.free.length === 0 ? "-" : fam.free.join(", ");
      const bindings = fam.bindings
        .map((b) => {
          const value = b.den === "1" ? b.num : `(${b.num}) / (${b.den})`;
          return `<li><code>${escapeHtml(b.var)} = ${escapeHtml(value)}</code></li>`;
        })
        .join("");
      const side = fam.inequalities.length
        ? `<p class="ineq">nonzero: ${fam.inequalities.map((q) => `<code>${escapeHtml(q)}</code>`).join(", ")}</p>`
        : "";
      return (
        `<details class="family"><summary><strong>${escapeHtml(fam.id)}</strong>` +
        ` case <code>${escapeHtml(fam.case)}</code> &middot; free: ${escapeHtml(free)}</summary>` +
        `<ul>${bindings}</ul>${side}</details>`
      );
    })
    .join("");
  return `<div class="families">${rows}</div>`;
}

export function renderCaseDetail(detail: CaseDetail): string {
  const assumption =
    detail.assumption === null
      ? ""
      : `<p>assumption: <code>${escapeHtml(detail.assumption.poly)} ${escapeHtml(detail.assumption.relation)}</code></p>`;
  const equations = detail.equations
    .map((eq, i) => {
      const fact =
        eq.factorization === null
          ? ""
          : ` <span class="fact">[${escapeHtml(eq.factorization.status)}: ${eq.factorization.factors
              .map(([f, m]) => (m === 1 ? escapeHtml(f) : `(${escapeHtml(f)})^${m}`))
              .join(" &middot; ")}]</span>`;
      return (
        `<li value="${i + 1}"><code>${escapeHtml(eq.poly)} = 0</code>` +
        ` <span class="eq-stats">(${eq.terms} terms, degree ${eq.degree}, vars ${eq.vars.join(" ")})</span>${fact}</li>`
      );
    })
    .join("");
  const nonzero = detail.nonzero.length
    ? `<p>nonzero: ${detail.nonzero.map((q) => `<code>${escapeHtml(q)}</code>`).join(", ")}</p>`
    : "";
  const bindings = detail.bindings.length
    ? `<p>bound: ${detail.bindings
        .map((b) => {
          const value = b.den === "1" ? b.num : `(${b.num}) / (${b.den})`;
          return `<code>u${b.var} = ${escapeHtml(value)}</code>`;
        })
        .join(", ")}</p>`
    : "";
  const todo = detail.todo.length
    ? `<p>queued: ${detail.todo.map(([code, p]) => `<code>${escapeHtml(code)}: ${escapeHtml(p)}</code>`).join(", ")}</p>`
    : "";
  return (
    `<h3>case <code>${escapeHtml(detail.id)}</code> ${statusBadge(detail.status)}</h3>` +
    (detail.note === "" ? "" : `<p class="note">${escapeHtml(detail.note)}</p>`) +
    assumption +
    `<ol class="equations">${equations}</ol>` +
    nonzero +
    bindings +
    todo
  );
}

/** Candidate table in server rank order, with apply buttons per row. */
export function renderCandidates(detail: CaseDetail): string {
  if (detail.candidates.length === 0) {
    return `<p class="empty">no split candidates for this case</p>`;
  }
  const rows = detail.candidates
    .map(
      (c) =>
        `<tr><td>${c.index + 1}</td><td>${escapeHtml(describeCandidate(c))}</td>` +
        `<td><button data-apply="90" data-case="${escapeHtml(detail.id)}" data-candidate="${c.index}">split all</button>` +
        ` <button data-apply="91" data-case="${escapeHtml(detail.id)}" data-candidate="${c.index}">split once</button></td></tr>`,
    )
    .join("");
  return (
    `<table class="candidates"><thead><tr><th>rank</th><th>candidate</th><th>apply</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

const LAMP_CLASS: Record<string, string> = {
  zero: "lamp-zero",
  nonzero: "lamp-nonzero",
  divzero: "lamp-divzero",
  pending: "lamp-pending",
};

export function renderLineLamps(lines: CheckLine[]): string {
  if (lines.length === 0) {
    return `<p class="empty">enter digits to audit the lines</p>`;
  }
  const items = lines
    .map((line) => {
      const cls = LAMP_CLASS[line.status] ?? "lamp-pending";
      const residual = line.residual === null ? "" : ` <code>${escapeHtml(line.residual)}</code>`;
      return `<li class="${cls}"><span class="lamp"></span>${escapeHtml(line.label)}: ${escapeHtml(line.status)}${residual}</li>`;
    })
    .join("");
  return `<ul class="lamps">${items}</ul>`;
}

/** One entry of the grid: a numeral word over the puzzle's letters, with
 * signs and division slashes rendered literally.  Every letter character
 * becomes a clickable span showing its assigned digit.
 */
function renderEntryWord(word: string, board: PlayBoard): string {
  return [...word]
    .map((ch) => {
      if (ch >= "a" && ch <= "z") {
        const digit = board.digitOf(ch);
        const shown = digit === null ? "&middot;" : String(digit);
        return (
          `<span class="cell-letter" data-letter="${ch}">` +
          `<span class="letter-name">${ch}</span><span class="digit">${shown}</span></span>`
        );
      }
      return `<span class="cell-sym">${escapeHtml(ch)}</span>`;
    })
    .join("");
}

/** Interleaved puzzle grid: entry cells with digits filled in, operator cells between. */
export function renderPuzzleGrid(puzzle: PuzzleBody, board: PlayBoard): string {
  const n = puzzle.size;
  const width = 2 * n - 1;
  const cells: string[] = [];
  for (let gi = 0; gi < width; gi++) {
    for (let gj = 0; gj < width; gj++) {
      if (gi % 2 === 0 && gj % 2 === 0) {
        const word = puzzle.cells[gi / 2]![gj / 2]!;
        cells.push(`<div class="cell entry">${renderEntryWord(word, board)}</div>`);
      } else if (gi % 2 === 0) {
        cells.push(`<div class="cell op">${escapeHtml(puzzle.row_ops[gi / 2]![(gj - 1) / 2]!)}</div>`);
      } else if (gj % 2 === 0) {
        cells.push(`<div class="cell op">${escapeHtml(puzzle.col_ops[(gi - 1) / 2]![gj / 2]!)}</div>`);
      } else {
        cells.push(`<div class="cell op diag">${escapeHtml(puzzle.diag_ops[(gi - 1) / 2]![(gj - 1) / 2]!)}</div>`);
      }
    }
  }
  return `<div class="grid" style="grid-template-columns: repeat(${width}, auto)">${cells.join("")}</div>`;
}

export function renderPalette(board: PlayBoard, selectedLetter: string | null): string {
  const letters = board.letters
    .map((letter) => {
      const digit = board.digitOf(letter);
      const mark = letter === selectedLetter ? " selected" : "";
      const held = digit === null ? "" : ` <span class="digit">${digit}</span>`;
      return `<button class="palette-letter${mark}" data-pick-letter="${escapeHtml(letter)}">${escapeHtml(letter)}${held}</button>`;
    })
    .join("");
  const digits = Array.from({ length: 10 }, (_, d) => {
    const holder = board.holderOf(d);
    const used = holder === null ? "" : " used";
    const title = holder === null ? "" : ` title="held by ${escapeHtml(holder)}"`;
    return `<button class="palette-digit${used}" data-pick-digit="${d}"${title}>${d}</button>`;
  }).join("");
  return (
    `<div class="palette"><div class="palette-row">${letters}</div>` +
    `<div class="palette-row">${digits}<button data-clear-letter="1">clear</button></div></div>`
  );
}

export function renderSessionList(sessions: SessionHandle[], selected: string | null): string {
  if (sessions.length === 0) {
    return `<p class="empty">no sessions yet</p>`;
  }
  const rows = sessions
    .map((s) => {
      const mark = s.id === selected ? " selected" : "";
      const state = s.running ? "running" : s.paused ? "paused" : "idle";
      return (
        `<li class="session-row${mark}" data-session="${escapeHtml(s.id)}">` +
        `<code>${escapeHtml(s.id)}</code> ${escapeHtml(state)} &middot; cases ${s.cases}` +
        ` &middot; families ${s.families.length}</li>`
      );
    })
    .join("");
  return `<ul class="sessions">${rows}</ul>`;
}
