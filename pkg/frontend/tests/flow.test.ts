// @vitest-environment jsdom
/** The full round trip against canned service bytes: load the sample
 * project, run the reference draft, tighten it with quality floors, then
 * hit an impossible deadline and watch the banner. Display values must be
 * exactly what the service sent.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { createApp, type App } from "../src/app.js";
import { cannedFetch, fixture } from "./helpers.js";

let root: HTMLElement;
let app: App;

function query<T extends Element>(selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing ${selector}`);
  return node as T;
}

function setValue(selector: string, value: string): void {
  query<HTMLInputElement>(selector).value = value;
}

async function loadTable1(): Promise<void> {
  query<HTMLTextAreaElement>("#project-text").value = fixture("table1-project.json");
  query<HTMLButtonElement>("#load-project").click();
  await app.whenIdle();
}

function fillPaperBounds(): void {
  setValue("#draft-label", "paper-bounds");
  query<HTMLSelectElement>("#coefficient-set").value = "appendix";
  setValue("#bound-cost-lower", "3060000");
  setValue("#bound-cost-upper", "4250000");
  setValue("#bound-time-lower", "29");
  setValue("#bound-time-upper", "42");
  setValue("#bound-quality_loss-lower", "0");
  setValue("#bound-quality_loss-upper", "1");
}

async function run(): Promise<void> {
  query<HTMLButtonElement>("#run-draft").click();
  await app.whenIdle();
}

beforeEach(() => {
  document.body.textContent = "";
  root = document.createElement("div");
  document.body.appendChild(root);
  app = createApp(root, new ServiceClient("http://svc", cannedFetch()));
});

describe("project loading", () => {
  it("renders nine rows with dependency chips and criterion ranges", async () => {
    await loadTable1();
    expect(root.querySelectorAll(".activity-row")).toHaveLength(9);
    const chips = Array.from(root.querySelectorAll(".dep-chip"))
      .map((chip) => chip.textContent);
    expect(chips).toContain("start");
    expect(chips.filter((chip) => chip === "B").length).toBeGreaterThanOrEqual(3);
    expect(query<HTMLButtonElement>("#run-draft").disabled).toBe(false);
    expect(query(".payoff-cost").textContent)
      .toBe("Cost: 3,060,000 to 4,300,000");
  });

  it("keeps the run button disabled for an empty file", async () => {
    query<HTMLButtonElement>("#load-project").click();
    await app.whenIdle();
    expect(query<HTMLButtonElement>("#run-draft").disabled).toBe(true);
    expect(query("#project-errors").textContent)
      .toContain("paste a project document first");
  });

  it("shows the service's violations for an invalid file", async () => {
    query<HTMLTextAreaElement>("#project-text").value = JSON.stringify({
      format_version: 1,
      name: "loop",
      activities: [
        { id: "A", depends_on: ["B"], normal_time: 3, crash_time: 2,
          normal_cost: 10, crash_cost: 20, crash_quality: 0.9 },
        { id: "B", depends_on: ["A"], normal_time: 3, crash_time: 2,
          normal_cost: 10, crash_cost: 20, crash_quality: 0.9 },
      ],
    });
    query<HTMLButtonElement>("#load-project").click();
    await app.whenIdle();
    expect(query("#project-errors").textContent)
      .toContain("dependency cycle: A -> B -> A");
    expect(query<HTMLButtonElement>("#run-draft").disabled).toBe(true);
  });
});

describe("scenario round trip", () => {
  it("runs the reference draft, tightens it, then hits the wall", async () => {
    await loadTable1();

    // reference satisfaction ranges
    fillPaperBounds();
    await run();
    let cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(1);
    expect(cards[0]!.querySelector(".card-lambda")!.textContent).toBe("0.7997312");
    const binding = cards[0]!.querySelector(".bar-row.binding .bar-name");
    expect(binding!.textContent).toBe("Time");
    const lastGantt = cards[0]!.querySelectorAll(".gantt-row");
    const iRow = lastGantt[lastGantt.length - 1]!;
    expect(iRow.querySelector(".gantt-span")!.textContent).toBe("24..34");
    expect(iRow.classList.contains("critical")).toBe(true);

    // add the two quality floors and run again
    setValue("#draft-label", "quality floors");
    query<HTMLButtonElement>("#add-floor").click();
    query<HTMLButtonElement>("#add-floor").click();
    const floorRows = root.querySelectorAll("#floors-list .pair-row");
    expect(floorRows).toHaveLength(2);
    (floorRows[0]!.querySelector("select") as HTMLSelectElement).value = "F";
    (floorRows[0]!.querySelector("input") as HTMLInputElement).value = "0.98";
    (floorRows[1]!.querySelector("select") as HTMLSelectElement).value = "I";
    (floorRows[1]!.querySelector("input") as HTMLInputElement).value = "0.96";
    await run();
    cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(2);
    expect(cards[0]!.querySelector(".card-lambda")!.textContent).toBe("0.7997312");
    expect(cards[1]!.querySelector(".card-lambda")!.textContent).toBe("0.6133791");
    const labels = Array.from(root.querySelectorAll(".card-label"))
      .map((node) => node.textContent);
    expect(labels).toEqual(["paper-bounds", "quality floors"]);
    const floorsGantt = cards[1]!.querySelectorAll(".gantt-row");
    expect(floorsGantt[floorsGantt.length - 1]!
      .querySelector(".gantt-span")!.textContent).toBe("25..35");

    // impossible deadline: banner, history untouched
    setValue("#draft-label", "deadline 28");
    setValue("#deadline-input", "28");
    await run();
    const banner = query<HTMLElement>("#banner");
    expect(banner.hidden).toBe(false);
    expect(banner.className).toContain("banner-infeasible");
    expect(banner.textContent)
      .toContain("deadline 28 is below the minimum achievable makespan 29");
    expect(root.querySelectorAll(".card")).toHaveLength(2);
  });

  it("blocks invalid drafts before they reach the service", async () => {
    await loadTable1();
    fillPaperBounds();
    setValue("#bound-time-lower", "50");  // reversed range
    await run();
    expect(root.querySelectorAll(".card")).toHaveLength(0);
    expect(query("#draft-problems").textContent)
      .toContain("time bounds: lower 50 above upper 42");
  });

  it("re-runs an identical draft into an identical card", async () => {
    await loadTable1();
    fillPaperBounds();
    await run();
    await run();
    const cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(2);
    expect(cards[0]!.innerHTML).toBe(cards[1]!.innerHTML);
  });
});
