/** Shared test plumbing: fixture loading and a canned-response fetch.
 *
 * Fixture bodies are byte captures from a real service run, so these
 * tests exercise the exact wire format without recomputing any numbers.
 */

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type { FetchLike } from "../src/api.js";
import type { ActivityRow, ProjectFileBody } from "../src/types.js";

// cwd is the frontend root under vitest; import.meta.url is unusable here
// because the jsdom environment rebases module urls onto http://localhost.
export function fixture(name: string): string {
  return readFileSync(resolve("tests", "fixtures", name), "utf8");
}

export function tableActivities(): ActivityRow[] {
  const body = JSON.parse(fixture("table1-project.json")) as ProjectFileBody;
  return body.activities;
}

function reply(status: number, body: string) {
  return { status, text: async () => body };
}

/** Serves captured service responses keyed on method, path, and body. */
export function cannedFetch(): FetchLike {
  return async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (method === "GET" && path === "/healthz") {
      return reply(200, "ok");
    }
    if (method === "POST" && path === "/api/projects") {
      let parsed: ProjectFileBody;
      try {
        parsed = JSON.parse(init?.body ?? "") as ProjectFileBody;
      } catch {
        return reply(422, fixture("invalid-project.json"));
      }
      const ids = (parsed.activities ?? []).map((a) => a.id);
      const cyclic = (parsed.activities ?? []).some((a) =>
        a.depends_on.some((dep) => dep === a.id || !ids.includes(dep) ||
          (parsed.activities.find((b) => b.id === dep)?.depends_on ?? [])
            .includes(a.id)));
      if (cyclic || ids.length === 0) {
        return reply(422, fixture("invalid-project.json"));
      }
      return reply(201, JSON.stringify({ id: "p1" }));
    }
    if (method === "GET" && path === "/api/projects/p1/payoff") {
      return reply(200, fixture("payoff-table1.json"));
    }
    if (method === "POST" && path === "/api/projects/p1/solve") {
      const scenario = JSON.parse(init?.body ?? "{}") as Record<string, unknown>;
      if (scenario.deadline === 28) {
        return reply(409, fixture("infeasible-deadline28.json"));
      }
      if (scenario.quality_floors !== undefined) {
        return reply(200, fixture("solve-paper-floors.json"));
      }
      return reply(200, fixture("solve-paper-bounds.json"));
    }
    return reply(404, JSON.stringify({ error: `no route for ${method} ${path}` }));
  };
}
