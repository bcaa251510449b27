import { describe, expect, it } from "vitest";

import {
  citationRangeLabel,
  deepLinkStartSeconds,
  escapeHtml,
  formatTimestamp,
} from "../src/format";

describe("formatTimestamp", () => {
  it("renders mm:ss for the cited start second", () => {
    expect(formatTimestamp(83000)).toBe("01:23");
  });

  it("zero pads", () => {
    expect(formatTimestamp(0)).toBe("00:00");
    expect(formatTimestamp(5000)).toBe("00:05");
  });

  it("floors sub-second parts", () => {
    expect(formatTimestamp(83999)).toBe("01:23");
  });

  it("grows to h:mm:ss past an hour", () => {
    expect(formatTimestamp(3_661_000)).toBe("1:01:01");
  });
});

describe("deepLinkStartSeconds", () => {
  it("floors milliseconds to seconds", () => {
    expect(deepLinkStartSeconds(83000)).toBe(83);
    expect(deepLinkStartSeconds(83999)).toBe(83);
  });
});

describe("citationRangeLabel", () => {
  it("joins start and end with an en dash", () => {
    expect(citationRangeLabel(83000, 95000)).toBe("01:23–01:35");
  });
});

describe("escapeHtml", () => {
  it("neutralizes markup in model text", () => {
    expect(escapeHtml('<img onerror="x">&')).toBe(
      "&lt;img onerror=&quot;x&quot;&gt;&amp;",
    );
  });
});
