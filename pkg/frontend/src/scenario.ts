/** Scenario drafts: what the editor holds before a run.
 *
 * Validation mirrors the service's file rules so obviously broken drafts
 * never leave the browser; anything subtler still gets the server's
 * verdict verbatim.
 */

import type { ActivityRow, CriterionKey } from "./types.js";
import { CRITERIA } from "./types.js";

export interface PairDraft {
  activity: string;
  value: string;
}

export interface RangeDraft {
  lower: string;
  upper: string;
}

export interface ScenarioDraft {
  label: string;
  coefficientSet: "" | "table1" | "appendix";
  deadline: string;
  budgetCap: string;
  qualityFloors: PairDraft[];
  durationLocks: PairDraft[];
  boundOverrides: Record<CriterionKey, RangeDraft>;
  dirty: boolean;
}

export function emptyDraft(label = "draft"): ScenarioDraft {
  return {
    label,
    coefficientSet: "",
    deadline: "",
    budgetCap: "",
    qualityFloors: [],
    durationLocks: [],
    boundOverrides: {
      cost: { lower: "", upper: "" },
      time: { lower: "", upper: "" },
      quality_loss: { lower: "", upper: "" },
    },
    dirty: false,
  };
}

function parseNumber(raw: string): number | null {
  const value = Number(raw.trim());
  return raw.trim() !== "" && Number.isFinite(value) ? value : null;
}

/** Client-side validation problems, empty when the draft can be sent. */
export function draftProblems(
  draft: ScenarioDraft,
  activities: ActivityRow[],
): string[] {
  const problems: string[] = [];
  const known = new Map(activities.map((a) => [a.id, a]));
  if (draft.label.trim() === "") problems.push("label: must not be empty");
  if (draft.deadline.trim() !== "") {
    const deadline = parseNumber(draft.deadline);
    if (deadline === null || deadline <= 0) {
      problems.push("deadline: must be a positive number");
    }
  }
  if (draft.budgetCap.trim() !== "") {
    const budget = parseNumber(draft.budgetCap);
    if (budget === null || budget <= 0) {
      problems.push("budget cap: must be a positive number");
    }
  }
  for (const floor of draft.qualityFloors) {
    if (floor.activity === "" && floor.value.trim() === "") continue;
    const row = known.get(floor.activity);
    if (!row) {
      problems.push(`quality floor: unknown activity "${floor.activity}"`);
      continue;
    }
    const value = parseNumber(floor.value);
    if (value === null || value <= 0 || value > 1) {
      problems.push(`quality floor ${floor.activity}: must be in (0, 1]`);
    }
  }
  for (const lock of draft.durationLocks) {
    if (lock.activity === "" && lock.value.trim() === "") continue;
    const row = known.get(lock.activity);
    if (!row) {
      problems.push(`duration lock: unknown activity "${lock.activity}"`);
      continue;
    }
    const value = parseNumber(lock.value);
    if (value === null || value < row.crash_time || value > row.normal_time) {
      problems.push(
        `duration lock ${lock.activity}: must lie in ` +
          `[${row.crash_time}, ${row.normal_time}]`,
      );
    }
  }
  for (const criterion of CRITERIA) {
    const range = draft.boundOverrides[criterion];
    const lowerRaw = range.lower.trim();
    const upperRaw = range.upper.trim();
    if (lowerRaw === "" && upperRaw === "") continue;
    if (lowerRaw === "" || upperRaw === "") {
      problems.push(`${criterion} bounds: need both lower and upper`);
      continue;
    }
    const lower = parseNumber(lowerRaw);
    const upper = parseNumber(upperRaw);
    if (lower === null || upper === null) {
      problems.push(`${criterion} bounds: must be numbers`);
    } else if (lower > upper) {
      problems.push(`${criterion} bounds: lower ${lower} above upper ${upper}`);
    }
  }
  return problems;
}

/** Serialize a validated draft to the scenario file the service expects. */
export function draftToScenarioText(draft: ScenarioDraft): string {
  const body: Record<string, unknown> = {
    format_version: 1,
    name: draft.label.trim(),
  };
  if (draft.coefficientSet !== "") body.coefficient_set = draft.coefficientSet;
  const deadline = parseNumber(draft.deadline);
  if (deadline !== null) body.deadline = deadline;
  const budget = parseNumber(draft.budgetCap);
  if (budget !== null) body.budget_cap = budget;
  const floors: Record<string, number> = {};
  for (const floor of draft.qualityFloors) {
    const value = parseNumber(floor.value);
    if (floor.activity !== "" && value !== null) floors[floor.activity] = value;
  }
  if (Object.keys(floors).length > 0) body.quality_floors = floors;
  const locks: Record<string, number> = {};
  for (const lock of draft.durationLocks) {
    const value = parseNumber(lock.value);
    if (lock.activity !== "" && value !== null) locks[lock.activity] = value;
  }
  if (Object.keys(locks).length > 0) body.duration_locks = locks;
  const overrides: Record<string, [number, number]> = {};
  for (const criterion of CRITERIA) {
    const range = draft.boundOverrides[criterion];
    const lower = parseNumber(range.lower);
    const upper = parseNumber(range.upper);
    if (lower !== null && upper !== null) overrides[criterion] = [lower, upper];
  }
  if (Object.keys(overrides).length > 0) body.bound_overrides = overrides;
  return JSON.stringify(body);
}
