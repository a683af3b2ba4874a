/** Wire types for the workbench steering service.
 *
 * Every numeric value the service sends is exact: integers arrive as JSON
 * numbers, rationals arrive as strings or as num/den string pairs.  The
 * client never converts them to floats.
 */

export interface SessionOptions {
  plist: string[];
  max_terms: number;
  max_cases: number;
  stop_after_families: number | null;
  explore_nonzero: boolean;
}

export interface SessionHandle {
  id: string;
  created_at: string;
  version: number;
  running: boolean;
  paused: boolean;
  options: SessionOptions;
  cases: number;
  statuses: Record<string, number>;
  families: string[];
  has_puzzle: boolean;
}

export interface TreeSummary {
  cases: number;
  statuses: Record<string, number>;
  families: string[];
}

export interface Assumption {
  poly: string;
  relation: string;
}

export interface TreeCaseRow {
  id: string;
  parent: string | null;
  status: string;
  explore: boolean;
  note: string;
  assumption: Assumption | null;
  equations: number;
  terms: number;
  max_terms: number;
  children: string[];
}

export interface FamilyBinding {
  var: string;
  num: string;
  den: string;
}

export interface FamilyDetail {
  id: string;
  case: string;
  free: string[];
  bindings: FamilyBinding[];
  inequalities: string[];
  total_vars: number;
}

export interface TreeResponse {
  version: number;
  summary: TreeSummary;
  cases: TreeCaseRow[];
  families: FamilyDetail[];
}

export interface Factorization {
  status: string;
  factors: [string, number][];
}

export interface EquationRow {
  poly: string;
  terms: number;
  degree: number;
  vars: string[];
  factorization: Factorization | null;
}

export interface CaseBinding {
  var: number;
  num: string;
  den: string;
}

export interface CandidateScore {
  eq_vars: number;
  eq_terms: number;
  degree: number;
  lin_terms: number;
  low_terms: number;
  pair_vars: number;
}

export interface CandidateRow {
  index: number;
  equation: number;
  var: string;
  degree: number;
  score: CandidateScore;
  uppers: number;
}

export interface CaseDetail {
  id: string;
  parent: string | null;
  status: string;
  note: string;
  explore: boolean;
  assumption: Assumption | null;
  equations: EquationRow[];
  nonzero: string[];
  or_groups: string[][];
  bindings: CaseBinding[];
  todo: [string, string][];
  children: string[];
  candidates: CandidateRow[];
  version: number;
}

export interface StepRequest {
  case: string;
  module: string;
  candidate?: number;
  version?: number;
}

export interface StepResponse {
  applied: boolean;
  module: string;
  note: string;
  children: string[];
  version: number;
}

export interface RunResponse {
  running: boolean;
  version: number;
}

export interface PauseResponse {
  running: boolean;
  paused: boolean;
  version: number;
}

export interface EventBatch {
  from: number;
  next: number;
  events: string[];
  running: boolean;
}

export interface PuzzleBody {
  id: string;
  size: number;
  letters: string[];
  leading_zero: boolean;
  diagonals: string;
  text: string;
  cells: string[][];
  row_ops: string[][];
  col_ops: string[][];
  diag_ops: string[][];
  attempts?: number;
}

export type LineStatus = "zero" | "nonzero" | "divzero" | "pending";

export interface CheckLine {
  label: string;
  status: LineStatus;
  residual: string | null;
}

export interface CheckReport {
  ok: boolean;
  problems: string[];
  lines: CheckLine[];
}

export interface RandomPuzzleRequest {
  size?: number;
  times?: number;
  div?: number;
  seed?: number;
  attempts?: number;
  param_bound?: number;
  diagonals?: string;
}

export interface CreateSessionRequest {
  system?: string;
  puzzle?: string;
  grid?: {
    size: number;
    row_ops: string[][];
    col_ops: string[][];
    diag_ops: string[][];
    diagonals?: string;
  };
  session?: string;
  options?: Partial<{
    plist: string | string[];
    max_terms: number;
    max_cases: number;
    stop_after_families: number | null;
    explore_nonzero: boolean;
  }>;
  autorun?: boolean;
}
