// UI contract against a fixture-backed service: the fetch stub replays
// responses captured verbatim from the running vidrag service.

import { beforeEach, describe, expect, it } from "vitest";

import { createApp } from "../src/app";
import { FetchLike } from "../src/api";
import { HOW_TO_RESPONSE, TOOLS, jsonResponse } from "./fixtures";

function fixtureService(): FetchLike {
  return async (url: string) => {
    if (url.endsWith("/v1/tools")) {
      return jsonResponse({ tools: TOOLS });
    }
    if (url.endsWith("/v1/query")) {
      return jsonResponse(HOW_TO_RESPONSE);
    }
    return new Response("not found", { status: 404 });
  };
}

function downService(): FetchLike {
  return async (url: string) => {
    if (url.endsWith("/v1/tools")) {
      return jsonResponse({ tools: TOOLS });
    }
    throw new TypeError("fetch failed: connection refused");
  };
}

const tick = () => new Promise((resolve) => setTimeout(resolve, 0));

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById("app") as HTMLElement;
});

describe("chat app", () => {
  it("renders a how-to answer as an ordered step list with a citation chip "
     + "linking the cited start second", async () => {
    const app = createApp(root, { fetchFn: fixtureService() });
    await app.submitQuery("how do i make pasta carbonara at home");
    await tick();

    const steps = root.querySelectorAll("ol.steps li");
    expect(steps.length).toBeGreaterThanOrEqual(1);
    expect(steps[0]?.textContent).toContain("silky cream");

    const chips = root.querySelectorAll("a.citation-chip");
    expect(chips.length).toBeGreaterThanOrEqual(1);
    const href = chips[0]?.getAttribute("href") ?? "";
    // cited start: 198000 ms -> t=198s
    expect(href.endsWith("t=198s")).toBe(true);
    expect(chips[0]?.textContent).toContain("03:18");
  });

  it("renders a visible error state with retry when the service is down", async () => {
    const app = createApp(root, { fetchFn: downService() });
    await app.submitQuery("anything at all");
    await tick();

    const notice = root.querySelector(".error-notice");
    expect(notice).not.toBeNull();
    expect(notice?.textContent).toContain("unreachable");
    expect(root.querySelector(".retry-button")).not.toBeNull();
    expect(root.querySelectorAll("ol.steps").length).toBe(0);
  });

  it("retry resubmits the failed query", async () => {
    let fail = true;
    const flaky: FetchLike = async (url: string) => {
      if (url.endsWith("/v1/tools")) {
        return jsonResponse({ tools: TOOLS });
      }
      if (fail) {
        throw new TypeError("fetch failed");
      }
      return jsonResponse(HOW_TO_RESPONSE);
    };
    const app = createApp(root, { fetchFn: flaky });
    await app.submitQuery("how do i make pasta carbonara at home");
    await tick();
    expect(root.querySelector(".error-notice")).not.toBeNull();

    fail = false;
    (root.querySelector(".retry-button") as HTMLButtonElement).click();
    await tick();
    await tick();
    expect(app.turnCount()).toBe(2);
    expect(root.querySelectorAll("ol.steps").length).toBe(1);
  });

  it("disables submit for empty input and while a query is pending", async () => {
    let release: (value: Response) => void = () => {};
    const gated: FetchLike = async (url: string) => {
      if (url.endsWith("/v1/tools")) {
        return jsonResponse({ tools: TOOLS });
      }
      return new Promise<Response>((resolve) => {
        release = resolve;
      });
    };
    const app = createApp(root, { fetchFn: gated });
    const input = root.querySelector(".query-input") as HTMLInputElement;
    const submit = root.querySelector(".submit-button") as HTMLButtonElement;

    expect(submit.disabled).toBe(true); // empty input
    input.value = "a question";
    input.dispatchEvent(new Event("input"));
    expect(submit.disabled).toBe(false);

    const inflight = app.submitQuery("a question");
    expect(app.isPending()).toBe(true);
    expect(submit.disabled).toBe(true); // pending lock
    release(jsonResponse(HOW_TO_RESPONSE));
    await inflight;
    expect(app.isPending()).toBe(false);
  });

  it("keeps turns in submission order", async () => {
    const app = createApp(root, { fetchFn: fixtureService() });
    await app.submitQuery("first question");
    await app.submitQuery("second question");
    await tick();
    const queries = Array.from(root.querySelectorAll(".user-query")).map(
      (el) => el.textContent,
    );
    expect(queries).toEqual(["first question", "second question"]);
  });

  it("populates the tool selector from /v1/tools with auto first", async () => {
    createApp(root, { fetchFn: fixtureService() });
    await tick();
    const options = Array.from(root.querySelectorAll(".tool-select option")).map(
      (o) => (o as HTMLOptionElement).value,
    );
    expect(options[0]).toBe("");
    expect(options).toContain("cooking");
    expect(options).toContain("travel");
  });

  it("omits the tool field when auto is selected and sends it when pinned", async () => {
    const bodies: string[] = [];
    const recording: FetchLike = async (url: string, init?: RequestInit) => {
      if (url.endsWith("/v1/tools")) {
        return jsonResponse({ tools: TOOLS });
      }
      bodies.push(String(init?.body));
      return jsonResponse(HOW_TO_RESPONSE);
    };
    const app = createApp(root, { fetchFn: recording });
    await tick();
    await app.submitQuery("auto routed question");
    const select = root.querySelector(".tool-select") as HTMLSelectElement;
    select.value = "cooking";
    await app.submitQuery("pinned question");

    expect(JSON.parse(bodies[0] ?? "{}")).toEqual({ query: "auto routed question" });
    expect(JSON.parse(bodies[1] ?? "{}")).toEqual({
      query: "pinned question",
      tool: "cooking",
    });
  });

  it("escapes model-controlled text before injecting", async () => {
    const hostile: FetchLike = async (url: string) => {
      if (url.endsWith("/v1/tools")) {
        return jsonResponse({ tools: TOOLS });
      }
      return jsonResponse({
        ...HOW_TO_RESPONSE,
        payload: { title: "<script>alert(1)</script>", steps: ["<b>bold</b> step"] },
      });
    };
    const app = createApp(root, { fetchFn: hostile });
    await app.submitQuery("hostile");
    await tick();
    expect(root.querySelector("script")).toBeNull();
    expect(root.querySelector("ol.steps b")).toBeNull();
    expect(root.textContent).toContain("<b>bold</b> step");
  });
});
