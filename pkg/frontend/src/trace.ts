/** Parser for workbench trace lines.
 *
 * A line is `kind key=value key=value ...`.  Values may contain spaces
 * (module notes, branch notes); the `note` field is always last on a line,
 * so once it starts it swallows the rest.  Other keys come from a fixed
 * vocabulary, which keeps note text containing `word=` lookalikes from
 * being split apart.
 */

export type TraceKind =
  | "step"
  | "status"
  | "branch"
  | "solution"
  | "limit"
  | "skip"
  | "run";

export interface TraceEvent {
  kind: TraceKind;
  fields: Record<string, string>;
}

const KINDS = new Set<string>(["step", "status", "branch", "solution", "limit", "skip", "run"]);

const KEYS = new Set<string>([
  "case",
  "status",
  "note",
  "children",
  "module",
  "family",
  "new",
  "free",
  "binding_terms",
  "kind",
  "max",
  "visited",
  "families",
  "cases",
]);

/** Parse one trace line; returns null for lines that are not trace events. */
export function parseTraceLine(line: string): TraceEvent | null {
  const space = line.indexOf(" ");
  const kind = space < 0 ? line : line.slice(0, space);
  if (!KINDS.has(kind)) {
    return null;
  }
  const fields: Record<string, string> = {};
  if (space < 0) {
    return { kind: kind as TraceKind, fields };
  }
  const rest = line.slice(space + 1);
  // Locate `key=` tokens at word starts, restricted to the known vocabulary.
  const starts: { key: string; at: number; valueAt: number }[] = [];
  const re = /(^|\s)([a-z_]+)=/g;
  for (let m = re.exec(rest); m !== null; m = re.exec(rest)) {
    const key = m[2]!;
    if (!KEYS.has(key)) {
      continue;
    }
    const at = m.index + m[1]!.length;
    starts.push({ key, at, valueAt: at + key.length + 1 });
    if (key === "note") {
      break; // note is always the final field and may contain anything
    }
  }
  for (let i = 0; i < starts.length; i++) {
    const cur = starts[i]!;
    const end = i + 1 < starts.length ? starts[i + 1]!.at : rest.length;
    fields[cur.key] = rest.slice(cur.valueAt, end).replace(/\s+$/, "");
  }
  return { kind: kind as TraceKind, fields };
}

/** Children listed on a branch line, in birth order. */
export function branchChildren(event: TraceEvent): string[] {
  const raw = event.fields["children"] ?? "";
  return raw === "" ? [] : raw.split(",");
}
