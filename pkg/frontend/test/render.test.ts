import { describe, expect, it } from "vitest";

import { renderAnswer, renderCitationChip, renderErrorNotice, renderPayload } from "../src/render";
import { HOW_TO_RESPONSE, PLACE_RESPONSE } from "./fixtures";
import { Citation, QueryResponse } from "../src/types";

describe("renderPayload", () => {
  it("renders how_to as an ordered step list", () => {
    const html = renderPayload(HOW_TO_RESPONSE);
    expect(html).toContain('<ol class="steps">');
    expect(html.match(/<li>/g)?.length).toBe(4);
    expect(html).toContain("silky cream");
  });

  it("renders place as name + description blocks", () => {
    const html = renderPayload(PLACE_RESPONSE);
    expect(html).toContain("Paris in a Day");
    expect(html).toContain("place-description");
    expect(html).toContain("Why notable:");
  });

  it("renders general as a paragraph", () => {
    const response: QueryResponse = {
      answer_type: "general",
      tool: "all",
      payload: { answer: "plain answer" },
      citations: [],
      retrieved: [],
    };
    expect(renderPayload(response)).toContain('<p class="answer-text">plain answer</p>');
  });

  it("renders unknown answer types as general with a warning badge", () => {
    const response: QueryResponse = {
      answer_type: "timeline",
      tool: "all",
      payload: { answer: "mystery" },
      citations: [],
      retrieved: [],
    };
    const html = renderPayload(response);
    expect(html).toContain("badge-warning");
    expect(html).toContain("mystery");
  });
});

describe("renderCitationChip", () => {
  const citation = HOW_TO_RESPONSE.citations[0] as Citation;

  it("links the chip at the cited start second", () => {
    const html = renderCitationChip(citation);
    expect(html).toContain('href="https://videos.example.com/watch?v=pasta-carbonara-basics&amp;t=198s"');
    expect(html).toContain("03:18"); // 198000 ms
  });

  it("shows the quoted text on hover", () => {
    expect(renderCitationChip(citation)).toContain(
      'title="the residual heat cooks the sauce gently into a silky cream"',
    );
  });

  it("renders an unlinked chip when the url is missing", () => {
    const bare = { ...citation, deep_link_url: "" };
    const html = renderCitationChip(bare);
    expect(html).not.toContain("<a");
    expect(html).toContain("citation-chip unlinked");
  });

  it("displays timestamps equal to payload values", () => {
    const html = renderCitationChip({ ...citation, start_ms: 83000, end_ms: 95000 });
    expect(html).toContain("01:23–01:35");
  });
});

describe("renderAnswer", () => {
  it("keeps citations in payload order", () => {
    const html = renderAnswer(PLACE_RESPONSE);
    const paris = html.indexOf("paris-walking-tour");
    const kyoto = html.indexOf("kyoto-temple-guide");
    expect(paris).toBeGreaterThan(-1);
    expect(kyoto).toBeGreaterThan(paris);
  });
});

describe("renderErrorNotice", () => {
  it("includes the message and a retry affordance", () => {
    const html = renderErrorNotice("service exploded");
    expect(html).toContain("service exploded");
    expect(html).toContain("retry-button");
    expect(html).toContain('role="alert"');
  });
});
