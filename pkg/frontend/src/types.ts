/** Wire types for the scenario service. Field names match the JSON bodies. */

export type CriterionKey = "cost" | "time" | "quality_loss";

export const CRITERIA: readonly CriterionKey[] = ["cost", "time", "quality_loss"];

export const CRITERION_LABELS: Record<CriterionKey, string> = {
  cost: "Cost",
  time: "Time",
  quality_loss: "Quality loss",
};

export interface ActivityRow {
  id: string;
  depends_on: string[];
  normal_time: number;
  crash_time: number;
  normal_cost: number;
  crash_cost: number;
  crash_quality: number;
  normal_quality?: number;
}

export interface ProjectFileBody {
  format_version: number;
  name: string;
  time_unit?: string;
  currency?: string;
  coefficient_set?: string;
  activities: ActivityRow[];
}

export interface SolveResponse {
  lambda: number;
  durations: Record<string, number>;
  starts: Record<string, number>;
  cost: number;
  time: number;
  quality_loss: number;
  memberships: Record<CriterionKey, number>;
  aggregate_quality: number;
  binding: CriterionKey[];
  stats: { bisection_iterations: number; milp_nodes: number };
}

export interface PayoffResponse {
  entries: Record<CriterionKey, Record<CriterionKey, number>>;
  lower: Record<CriterionKey, number>;
  upper: Record<CriterionKey, number>;
  solutions: Record<CriterionKey, Record<string, number>>;
}

export interface ProblemBody {
  error: string;
  violations?: string[];
}
