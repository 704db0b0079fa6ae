import { describe, expect, it } from "vitest";

import { History, makeCard } from "../src/history.js";
import type { SolveResponse } from "../src/types.js";
import { fixture, tableActivities } from "./helpers.js";

const activities = tableActivities();
const response = JSON.parse(fixture("solve-paper-bounds.json")) as SolveResponse;

describe("makeCard", () => {
  it("copies the service numbers verbatim into bars", () => {
    const card = makeCard("paper-bounds", activities, response);
    expect(card.bars.map((bar) => bar.criterion))
      .toEqual(["cost", "time", "quality_loss"]);
    expect(card.bars.map((bar) => bar.value)).toEqual([
      response.memberships.cost,
      response.memberships.time,
      response.memberships.quality_loss,
    ]);
    expect(card.bars.filter((bar) => bar.binding).map((bar) => bar.criterion))
      .toEqual(["time"]);
  });

  it("builds identical cards from identical responses", () => {
    const first = makeCard("again", activities, response);
    const second = makeCard("again", activities, response);
    expect(JSON.stringify(first)).toBe(JSON.stringify(second));
  });
});

describe("History", () => {
  it("appends and never loses cards", () => {
    const history = new History();
    expect(history.length).toBe(0);
    history.append(makeCard("one", activities, response));
    history.append(makeCard("two", activities, response));
    expect(history.length).toBe(2);
    expect(history.all().map((card) => card.label)).toEqual(["one", "two"]);
  });

  it("hands out snapshots, not its internal list", () => {
    const history = new History();
    history.append(makeCard("keep", activities, response));
    const snapshot = history.all() as unknown as unknown[];
    snapshot.pop();
    expect(history.length).toBe(1);
  });
});
