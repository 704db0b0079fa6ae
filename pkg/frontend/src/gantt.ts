/** Gantt row math.
 *
 * Starts, durations, and the makespan all come from the service response;
 * this module only lays them out. The critical flag is schedule
 * arithmetic (zero total float under the returned durations), which the
 * service does not send, so it is derived here from the precedence graph
 * and the returned schedule.
 */

import type { ActivityRow, SolveResponse } from "./types.js";

export interface GanttRow {
  id: string;
  start: number;
  duration: number;
  finish: number;
  critical: boolean;
  offsetPct: number;
  widthPct: number;
}

const FLOAT_TOL = 1e-9;

function topologicalOrder(activities: ActivityRow[]): string[] {
  const remaining = new Map<string, number>();
  const successors = new Map<string, string[]>();
  for (const activity of activities) {
    remaining.set(activity.id, activity.depends_on.length);
    for (const dep of activity.depends_on) {
      const list = successors.get(dep) ?? [];
      list.push(activity.id);
      successors.set(dep, list);
    }
  }
  const queue = activities
    .filter((a) => a.depends_on.length === 0)
    .map((a) => a.id);
  const order: string[] = [];
  while (queue.length > 0) {
    const id = queue.shift() as string;
    order.push(id);
    for (const succ of successors.get(id) ?? []) {
      const left = (remaining.get(succ) ?? 0) - 1;
      remaining.set(succ, left);
      if (left === 0) queue.push(succ);
    }
  }
  return order;
}

export function buildGanttRows(
  activities: ActivityRow[],
  result: SolveResponse,
): GanttRow[] {
  const makespan = result.time;
  const successors = new Map<string, string[]>();
  for (const activity of activities) {
    for (const dep of activity.depends_on) {
      const list = successors.get(dep) ?? [];
      list.push(activity.id);
      successors.set(dep, list);
    }
  }
  // Backward pass over the reversed topological order, so every successor
  // has its latest start settled before its predecessors need it.
  const latestStart = new Map<string, number>();
  const order = topologicalOrder(activities);
  for (let i = order.length - 1; i >= 0; i--) {
    const id = order[i] as string;
    const duration = result.durations[id] ?? 0;
    let latestFinish = makespan;
    for (const succ of successors.get(id) ?? []) {
      const succLatest = latestStart.get(succ);
      if (succLatest !== undefined && succLatest < latestFinish) {
        latestFinish = succLatest;
      }
    }
    latestStart.set(id, latestFinish - duration);
  }
  const rows: GanttRow[] = activities.map((activity) => {
    const start = result.starts[activity.id] ?? 0;
    const duration = result.durations[activity.id] ?? 0;
    const slack = (latestStart.get(activity.id) ?? start) - start;
    const span = makespan > 0 ? makespan : 1;
    return {
      id: activity.id,
      start,
      duration,
      finish: start + duration,
      critical: slack <= FLOAT_TOL,
      offsetPct: (start / span) * 100,
      widthPct: (duration / span) * 100,
    };
  });
  rows.sort((a, b) => a.start - b.start || a.id.localeCompare(b.id));
  return rows;
}
