/** Single-page what-if explorer. All DOM work lives here; the other
 * modules are pure. The page speaks only the scenario service wire
 * format, and every solver figure on screen is taken verbatim from a
 * service response.
 */

import { InfeasibleError, ServiceClient, ServiceError } from "./api.js";
import { formatLambda, formatMoney, formatNumber } from "./format.js";
import { History, makeCard, type SolveCard } from "./history.js";
import {
  draftProblems,
  draftToScenarioText,
  emptyDraft,
  type PairDraft,
  type ScenarioDraft,
} from "./scenario.js";
import type { ActivityRow, PayoffResponse, ProjectFileBody } from "./types.js";
import { CRITERIA, CRITERION_LABELS } from "./types.js";

export interface App {
  root: HTMLElement;
  /** Resolves once no request is in flight; used by tests to await runs. */
  whenIdle(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, client: ServiceClient): App {
  let projectId: string | null = null;
  let activities: ActivityRow[] = [];
  let timeUnit = "weeks";
  let inFlight = 0;
  let idleWaiters: Array<() => void> = [];
  const history = new History();

  function track<T>(work: Promise<T>): Promise<T> {
    inFlight += 1;
    const release = () => {
      inFlight -= 1;
      if (inFlight === 0) {
        const waiters = idleWaiters;
        idleWaiters = [];
        for (const wake of waiters) wake();
      }
    };
    return work.finally(release);
  }

  root.textContent = "";
  root.appendChild(el("h1", "app-title", "pmfuzz what-if explorer"));

  // ---------------------------------------------------------- project panel
  const projectSection = el("section", "panel project-panel");
  projectSection.appendChild(el("h2", undefined, "Project"));
  const projectText = el("textarea", "project-text");
  projectText.id = "project-text";
  projectText.rows = 6;
  projectText.placeholder = "Paste a project JSON document here";
  const loadButton = el("button", "load-project", "Load project");
  loadButton.id = "load-project";
  const projectErrors = el("ul", "problem-list project-errors");
  projectErrors.id = "project-errors";
  const activityTable = el("div", "activity-table");
  activityTable.id = "activity-table";
  const payoffPanel = el("div", "payoff-panel");
  payoffPanel.id = "payoff-panel";
  projectSection.append(projectText, loadButton, projectErrors, activityTable, payoffPanel);
  root.appendChild(projectSection);

  // ------------------------------------------------------------ draft panel
  const draftSection = el("section", "panel draft-panel");
  draftSection.appendChild(el("h2", undefined, "Scenario draft"));
  const labelInput = el("input", "draft-label");
  labelInput.id = "draft-label";
  labelInput.value = "draft 1";
  const coefficientSelect = el("select", "coefficient-set");
  coefficientSelect.id = "coefficient-set";
  for (const option of ["", "table1", "appendix"]) {
    const node = el("option", undefined, option === "" ? "project default" : option);
    node.value = option;
    coefficientSelect.appendChild(node);
  }
  const deadlineInput = el("input", "deadline-input");
  deadlineInput.id = "deadline-input";
  const budgetInput = el("input", "budget-input");
  budgetInput.id = "budget-input";

  function labeled(text: string, control: HTMLElement): HTMLElement {
    const wrap = el("label", "field");
    wrap.append(el("span", "field-name", text), control);
    return wrap;
  }

  draftSection.append(
    labeled("Label", labelInput),
    labeled("Coefficient set", coefficientSelect),
    labeled("Deadline", deadlineInput),
    labeled("Budget cap", budgetInput),
  );

  const floorsList = el("div", "pair-list floors-list");
  floorsList.id = "floors-list";
  const addFloor = el("button", "add-floor", "Add quality floor");
  addFloor.id = "add-floor";
  const locksList = el("div", "pair-list locks-list");
  locksList.id = "locks-list";
  const addLock = el("button", "add-lock", "Add duration lock");
  addLock.id = "add-lock";
  draftSection.append(
    labeled("Quality floors", floorsList), addFloor,
    labeled("Duration locks", locksList), addLock,
  );

  const boundsGrid = el("div", "bounds-grid");
  const boundInputs: Record<string, { lower: HTMLInputElement; upper: HTMLInputElement }> = {};
  for (const criterion of CRITERIA) {
    const row = el("div", `bounds-row bounds-${criterion}`);
    const lower = el("input", "bound-lower");
    lower.id = `bound-${criterion}-lower`;
    const upper = el("input", "bound-upper");
    upper.id = `bound-${criterion}-upper`;
    row.append(el("span", "field-name", `${CRITERION_LABELS[criterion]} range`), lower, upper);
    boundsGrid.appendChild(row);
    boundInputs[criterion] = { lower, upper };
  }
  draftSection.append(labeled("Satisfaction ranges", boundsGrid));

  const draftProblemsList = el("ul", "problem-list draft-problems");
  draftProblemsList.id = "draft-problems";
  const runButton = el("button", "run-draft", "Run scenario");
  runButton.id = "run-draft";
  runButton.disabled = true;
  draftSection.append(draftProblemsList, runButton);
  root.appendChild(draftSection);

  // ---------------------------------------------------------------- banner
  const banner = el("div", "banner");
  banner.id = "banner";
  banner.setAttribute("role", "alert");
  banner.hidden = true;
  root.appendChild(banner);

  // --------------------------------------------------------------- history
  const historySection = el("section", "panel history-panel");
  historySection.appendChild(el("h2", undefined, "History"));
  const historyList = el("div", "history");
  historyList.id = "history";
  historySection.appendChild(historyList);
  root.appendChild(historySection);

  function showBanner(kind: "infeasible" | "error", message: string, violations: string[] = []): void {
    banner.hidden = false;
    banner.className = `banner banner-${kind}`;
    banner.textContent = "";
    banner.appendChild(el("strong", "banner-title",
      kind === "infeasible" ? "Infeasible scenario" : "Request failed"));
    banner.appendChild(el("span", "banner-message", message));
    for (const violation of violations) {
      banner.appendChild(el("div", "banner-violation", violation));
    }
  }

  function clearBanner(): void {
    banner.hidden = true;
    banner.textContent = "";
  }

  function renderProblems(target: HTMLElement, problems: string[]): void {
    target.textContent = "";
    for (const problem of problems) {
      target.appendChild(el("li", "problem", problem));
    }
  }

  function pairRow(list: HTMLElement, kind: string): void {
    const row = el("div", `pair-row ${kind}-row`);
    const select = el("select", "pair-activity");
    const blank = el("option", undefined, "choose");
    blank.value = "";
    select.appendChild(blank);
    for (const activity of activities) {
      const option = el("option", undefined, activity.id);
      option.value = activity.id;
      select.appendChild(option);
    }
    const value = el("input", "pair-value");
    const remove = el("button", "pair-remove", "remove");
    remove.addEventListener("click", (event) => {
      event.preventDefault();
      row.remove();
    });
    row.append(select, value, remove);
    list.appendChild(row);
  }

  addFloor.addEventListener("click", (event) => {
    event.preventDefault();
    pairRow(floorsList, "floor");
  });
  addLock.addEventListener("click", (event) => {
    event.preventDefault();
    pairRow(locksList, "lock");
  });

  function readPairs(list: HTMLElement): PairDraft[] {
    const rows: PairDraft[] = [];
    for (const row of Array.from(list.children)) {
      const select = row.querySelector("select");
      const input = row.querySelector("input");
      if (!select || !input) continue;
      rows.push({ activity: select.value, value: input.value });
    }
    return rows;
  }

  function draftFromInputs(): ScenarioDraft {
    const draft = emptyDraft(labelInput.value);
    draft.coefficientSet = coefficientSelect.value as ScenarioDraft["coefficientSet"];
    draft.deadline = deadlineInput.value;
    draft.budgetCap = budgetInput.value;
    draft.qualityFloors = readPairs(floorsList);
    draft.durationLocks = readPairs(locksList);
    for (const criterion of CRITERIA) {
      const inputs = boundInputs[criterion];
      if (!inputs) continue;
      draft.boundOverrides[criterion] = {
        lower: inputs.lower.value,
        upper: inputs.upper.value,
      };
    }
    return draft;
  }

  function renderActivityTable(): void {
    activityTable.textContent = "";
    if (activities.length === 0) return;
    const table = el("table", "activities");
    const head = el("tr");
    for (const column of ["id", "depends on", "time", "crash time",
                          "cost", "crash cost", "crash quality"]) {
      head.appendChild(el("th", undefined, column));
    }
    table.appendChild(head);
    for (const activity of activities) {
      const row = el("tr", "activity-row");
      row.appendChild(el("td", "activity-id", activity.id));
      const deps = el("td", "activity-deps");
      if (activity.depends_on.length === 0) {
        deps.appendChild(el("span", "dep-chip dep-none", "start"));
      }
      for (const dep of activity.depends_on) {
        deps.appendChild(el("span", "dep-chip", dep));
      }
      row.appendChild(deps);
      row.appendChild(el("td", undefined, formatNumber(activity.normal_time)));
      row.appendChild(el("td", undefined, formatNumber(activity.crash_time)));
      row.appendChild(el("td", undefined, formatMoney(activity.normal_cost)));
      row.appendChild(el("td", undefined, formatMoney(activity.crash_cost)));
      row.appendChild(el("td", undefined, formatNumber(activity.crash_quality)));
      table.appendChild(row);
    }
    activityTable.appendChild(table);
  }

  function renderPayoff(payoff: PayoffResponse): void {
    payoffPanel.textContent = "";
    payoffPanel.appendChild(el("h3", undefined, "Criterion ranges"));
    for (const criterion of CRITERIA) {
      const line = el("div", `payoff-row payoff-${criterion}`);
      const lower = payoff.lower[criterion];
      const upper = payoff.upper[criterion];
      const fmt = criterion === "cost" ? formatMoney : formatNumber;
      line.textContent =
        `${CRITERION_LABELS[criterion]}: ${fmt(lower)} to ${fmt(upper)}`;
      payoffPanel.appendChild(line);
    }
  }

  function renderCard(card: SolveCard): HTMLElement {
    const article = el("article", "card");
    const header = el("header", "card-header");
    header.appendChild(el("h3", "card-label", card.label));
    const lambda = el("span", "card-lambda", formatLambda(card.response.lambda));
    header.appendChild(lambda);
    article.appendChild(header);

    const values = el("dl", "card-values");
    const pairs: Array<[string, string]> = [
      ["Cost", formatMoney(card.response.cost)],
      ["Time", `${formatNumber(card.response.time)} ${timeUnit}`],
      ["Quality loss", formatNumber(card.response.quality_loss)],
      ["Aggregate quality", formatNumber(card.response.aggregate_quality)],
    ];
    for (const [term, value] of pairs) {
      values.appendChild(el("dt", undefined, term));
      values.appendChild(el("dd", undefined, value));
    }
    article.appendChild(values);

    const bars = el("div", "bars");
    for (const bar of card.bars) {
      const row = el("div", bar.binding ? "bar-row binding" : "bar-row");
      row.appendChild(el("span", "bar-name", CRITERION_LABELS[bar.criterion]));
      const track = el("div", "bar-track");
      const fill = el("div", "bar-fill");
      fill.style.width = `${Math.max(0, Math.min(1, bar.value)) * 100}%`;
      track.appendChild(fill);
      row.appendChild(track);
      row.appendChild(el("span", "bar-value", formatNumber(bar.value)));
      if (bar.binding) row.appendChild(el("span", "bar-binding", "binding"));
      bars.appendChild(row);
    }
    article.appendChild(bars);

    const gantt = el("div", "gantt");
    for (const row of card.gantt) {
      const line = el("div", row.critical ? "gantt-row critical" : "gantt-row");
      line.dataset.activity = row.id;
      line.appendChild(el("span", "gantt-id", row.id));
      const track = el("div", "gantt-track");
      const bar = el("div", "gantt-bar");
      bar.style.marginLeft = `${row.offsetPct}%`;
      bar.style.width = `${Math.max(row.widthPct, 0.5)}%`;
      bar.title = `${row.id}: ${formatNumber(row.start)} to ${formatNumber(row.finish)}`;
      track.appendChild(bar);
      line.appendChild(track);
      line.appendChild(el("span", "gantt-span",
        `${formatNumber(row.start)}..${formatNumber(row.finish)}`));
      gantt.appendChild(line);
    }
    article.appendChild(gantt);

    const stats = card.response.stats;
    article.appendChild(el("footer", "card-stats",
      `bisection steps ${stats.bisection_iterations}, ` +
      `branch and bound nodes ${stats.milp_nodes}`));
    return article;
  }

  function renderHistory(): void {
    historyList.textContent = "";
    for (const card of history.all()) {
      historyList.appendChild(renderCard(card));
    }
  }

  async function loadProject(): Promise<void> {
    clearBanner();
    const text = projectText.value.trim();
    if (text === "") {
      renderProblems(projectErrors, ["paste a project document first"]);
      runButton.disabled = true;
      return;
    }
    try {
      const created = await client.createProject(text);
      projectId = created.id;
      const body = JSON.parse(text) as ProjectFileBody;
      activities = body.activities;
      timeUnit = body.time_unit ?? "weeks";
      renderProblems(projectErrors, []);
      renderActivityTable();
      runButton.disabled = false;
      const payoff = await client.payoff(projectId);
      renderPayoff(payoff);
    } catch (err) {
      if (err instanceof ServiceError) {
        renderProblems(projectErrors, [err.message, ...err.violations]);
      } else {
        renderProblems(projectErrors, [String(err)]);
      }
      if (projectId === null) runButton.disabled = true;
    }
  }

  async function runDraft(): Promise<void> {
    if (projectId === null || runButton.disabled) return;
    clearBanner();
    const draft = draftFromInputs();
    const problems = draftProblems(draft, activities);
    renderProblems(draftProblemsList, problems);
    if (problems.length > 0) return;
    // one in-flight solve per draft editor
    runButton.disabled = true;
    try {
      const response = await client.solve(projectId, draftToScenarioText(draft));
      history.append(makeCard(draft.label.trim(), activities, response));
      renderHistory();
    } catch (err) {
      if (err instanceof InfeasibleError) {
        showBanner("infeasible", err.message);
      } else if (err instanceof ServiceError) {
        showBanner("error", err.message, err.violations);
      } else {
        showBanner("error", String(err));
      }
    } finally {
      runButton.disabled = false;
    }
  }

  // track() wraps the whole handler so whenIdle resolves only after the
  // DOM has been updated, not merely after the network call settled.
  loadButton.addEventListener("click", (event) => {
    event.preventDefault();
    void track(loadProject());
  });
  runButton.addEventListener("click", (event) => {
    event.preventDefault();
    void track(runDraft());
  });

  return {
    root,
    whenIdle(): Promise<void> {
      if (inFlight === 0) return Promise.resolve();
      return new Promise((resolve) => idleWaiters.push(resolve));
    },
  };
}

const mount = typeof document !== "undefined"
  ? document.getElementById("app")
  : null;
if (mount) {
  const base = mount.dataset.serviceUrl ?? "";
  createApp(mount, new ServiceClient(base));
}
