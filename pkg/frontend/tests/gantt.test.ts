import { describe, expect, it } from "vitest";

import { buildGanttRows } from "../src/gantt.js";
import type { SolveResponse } from "../src/types.js";
import { fixture, tableActivities } from "./helpers.js";

const activities = tableActivities();

function solveFixture(name: string): SolveResponse {
  return JSON.parse(fixture(name)) as SolveResponse;
}

describe("buildGanttRows", () => {
  it("lays out the unconstrained solution with its critical chain", () => {
    const rows = buildGanttRows(activities, solveFixture("solve-paper-bounds.json"));
    expect(rows).toHaveLength(9);
    const last = rows[rows.length - 1]!;
    expect(last.id).toBe("I");
    expect(last.finish).toBe(34);
    const critical = rows.filter((row) => row.critical).map((row) => row.id).sort();
    expect(critical).toEqual(["A", "B", "D", "F", "G", "I"]);
    // rows come back in start order
    const starts = rows.map((row) => row.start);
    expect([...starts].sort((a, b) => a - b)).toEqual(starts);
  });

  it("pushes the finish to 35 under the quality floors", () => {
    const rows = buildGanttRows(activities, solveFixture("solve-paper-floors.json"));
    const last = rows[rows.length - 1]!;
    expect(last.id).toBe("I");
    expect(last.finish).toBe(35);
  });

  it("scales offsets and widths to the makespan", () => {
    const result = solveFixture("solve-paper-bounds.json");
    const rows = buildGanttRows(activities, result);
    for (const row of rows) {
      expect(row.offsetPct).toBeCloseTo((row.start / result.time) * 100, 10);
      expect(row.widthPct).toBeCloseTo((row.duration / result.time) * 100, 10);
    }
  });

  it("handles a single activity as one bar from zero", () => {
    const single = [{ id: "X", depends_on: [], normal_time: 5, crash_time: 2,
                      normal_cost: 10, crash_cost: 20, crash_quality: 0.9 }];
    const rows = buildGanttRows(single, {
      lambda: 1, durations: { X: 5 }, starts: { X: 0 }, cost: 10, time: 5,
      quality_loss: 0, memberships: { cost: 1, time: 1, quality_loss: 1 },
      aggregate_quality: 1, binding: [], stats: { bisection_iterations: 0, milp_nodes: 0 },
    });
    expect(rows).toEqual([{
      id: "X", start: 0, duration: 5, finish: 5, critical: true,
      offsetPct: 0, widthPct: 100,
    }]);
  });

  it("does not divide by zero on an all-instant schedule", () => {
    const single = [{ id: "X", depends_on: [], normal_time: 0, crash_time: 0,
                      normal_cost: 10, crash_cost: 10, crash_quality: 1 }];
    const rows = buildGanttRows(single, {
      lambda: 1, durations: { X: 0 }, starts: { X: 0 }, cost: 10, time: 0,
      quality_loss: 0, memberships: { cost: 1, time: 1, quality_loss: 1 },
      aggregate_quality: 1, binding: [], stats: { bisection_iterations: 0, milp_nodes: 0 },
    });
    expect(rows[0]!.widthPct).toBe(0);
    expect(Number.isFinite(rows[0]!.offsetPct)).toBe(true);
  });
});
