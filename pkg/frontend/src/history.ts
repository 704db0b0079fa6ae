/** Append-only run history.
 *
 * A card freezes one solve response together with the layout rows for its
 * Gantt strip. Cards are never edited or removed within a session, so
 * side-by-side comparison always has the original numbers.
 */

import { buildGanttRows, type GanttRow } from "./gantt.js";
import type { ActivityRow, CriterionKey, SolveResponse } from "./types.js";
import { CRITERIA } from "./types.js";

export interface MembershipBar {
  criterion: CriterionKey;
  value: number;
  binding: boolean;
}

export interface SolveCard {
  label: string;
  response: SolveResponse;
  bars: MembershipBar[];
  gantt: GanttRow[];
}

export function makeCard(
  label: string,
  activities: ActivityRow[],
  response: SolveResponse,
): SolveCard {
  const bars: MembershipBar[] = CRITERIA.map((criterion) => ({
    criterion,
    value: response.memberships[criterion],
    binding: response.binding.includes(criterion),
  }));
  return { label, response, bars, gantt: buildGanttRows(activities, response) };
}

export class History {
  private readonly cards: SolveCard[] = [];

  append(card: SolveCard): number {
    this.cards.push(card);
    return this.cards.length;
  }

  /** Snapshot in append order; the internal list stays private. */
  all(): readonly SolveCard[] {
    return [...this.cards];
  }

  get length(): number {
    return this.cards.length;
  }
}
