/** Step-picker helpers.
 *
 * Candidate rows arrive ranked by the server and are shown in that order;
 * the client never re-sorts or re-scores them.  Error classification maps
 * the service's failure modes onto the three banners the dashboard shows.
 */

import { ApiError } from "./api.js";
import type { CandidateRow, StepRequest } from "./types.js";

export interface StepFailure {
  kind: "lost-race" | "busy" | "not-applicable" | "error";
  message: string;
}

/** Build the request for applying a ranked split candidate.
 *
 * Module 90 consumes the whole upper stack at once; module 91 queues the
 * single pair branch.  The snapshot version makes the request first-writer
 * -wins: if another actor stepped first, the service answers 409.
 */
export function candidateStepRequest(
  caseId: string,
  candidate: CandidateRow,
  module: "90" | "91",
  version: number,
): StepRequest {
  return { case: caseId, module, candidate: candidate.index, version };
}

export function moduleStepRequest(caseId: string, module: string, version: number): StepRequest {
  return { case: caseId, module, version };
}

/** Map a failed step to the banner the dashboard shows. */
export function classifyStepFailure(err: unknown): StepFailure {
  if (!(err instanceof ApiError)) {
    return { kind: "error", message: err instanceof Error ? err.message : String(err) };
  }
  if (err.status === 409) {
    if (err.detail.startsWith("version conflict")) {
      return { kind: "lost-race", message: `another step won: ${err.detail}` };
    }
    return { kind: "busy", message: err.detail };
  }
  if (err.status === 422) {
    const reason = err.detail.startsWith("not applicable: ")
      ? err.detail.slice("not applicable: ".length)
      : err.detail;
    return { kind: "not-applicable", message: reason };
  }
  return { kind: "error", message: err.detail };
}

/** One-line description of a candidate for list rendering. */
export function describeCandidate(candidate: CandidateRow): string {
  const s = candidate.score;
  return (
    `equation ${candidate.equation}, ${candidate.var} (degree ${candidate.degree}); ` +
    `score: vars=${s.eq_vars} terms=${s.eq_terms} degree=${s.degree} ` +
    `lin=${s.lin_terms} low=${s.low_terms} pair=${s.pair_vars}; ` +
    `uppers=${candidate.uppers}`
  );
}
