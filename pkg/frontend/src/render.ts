// Pure HTML renderers for chat turns. Rendering is exhaustive over
// answer_type: unknown types fall back to the general layout with a
// warning badge so the screen is never blank.

import { citationRangeLabel, escapeHtml } from "./format";
import {
  Citation,
  GeneralPayload,
  HowToPayload,
  PlacePayload,
  QueryResponse,
} from "./types";

export function renderCitationChip(citation: Citation): string {
  const label = escapeHtml(citation.title || citation.video_id);
  const range = citationRangeLabel(citation.start_ms, citation.end_ms);
  const quote = escapeHtml(citation.quoted_text);
  const inner = `<span class="chip-title">${label}</span><span class="chip-range">${range}</span>`;
  if (!citation.deep_link_url) {
    return `<span class="citation-chip unlinked" title="${quote}">${inner}</span>`;
  }
  const href = escapeHtml(citation.deep_link_url);
  return (
    `<a class="citation-chip" href="${href}" target="_blank" rel="noopener"` +
    ` title="${quote}">${inner}</a>`
  );
}

export function renderCitations(citations: Citation[]): string {
  if (!citations.length) {
    return "";
  }
  return `<div class="citations">${citations.map(renderCitationChip).join("")}</div>`;
}

function renderHowTo(payload: HowToPayload): string {
  const steps = payload.steps
    .map((step) => `<li>${escapeHtml(step)}</li>`)
    .join("");
  return (
    `<h3 class="answer-title">${escapeHtml(payload.title)}</h3>` +
    `<ol class="steps">${steps}</ol>`
  );
}

function renderPlace(payload: PlacePayload): string {
  return (
    `<h3 class="answer-title">${escapeHtml(payload.name)}</h3>` +
    `<p class="place-description">${escapeHtml(payload.description)}</p>` +
    `<p class="place-notable"><em>Why notable:</em> ${escapeHtml(payload.why_notable)}</p>`
  );
}

function renderGeneral(payload: GeneralPayload): string {
  return `<p class="answer-text">${escapeHtml(payload.answer)}</p>`;
}

export function renderPayload(response: QueryResponse): string {
  const payload = response.payload as unknown;
  switch (response.answer_type) {
    case "how_to":
      return renderHowTo(payload as HowToPayload);
    case "place":
      return renderPlace(payload as PlacePayload);
    case "general":
      return renderGeneral(payload as GeneralPayload);
    default: {
      const text =
        typeof (payload as GeneralPayload).answer === "string"
          ? (payload as GeneralPayload).answer
          : JSON.stringify(payload);
      return (
        `<span class="badge-warning">unrecognized answer type ` +
        `"${escapeHtml(response.answer_type)}"</span>` +
        renderGeneral({ answer: text })
      );
    }
  }
}

export function renderAnswer(response: QueryResponse): string {
  return (
    `<div class="answer answer-${escapeHtml(response.answer_type)}">` +
    renderPayload(response) +
    renderCitations(response.citations) +
    `</div>`
  );
}

export function renderErrorNotice(message: string): string {
  return (
    `<div class="error-notice" role="alert">` +
    `<span class="error-text">${escapeHtml(message)}</span>` +
    `<button type="button" class="retry-button">retry</button>` +
    `</div>`
  );
}

export function renderPending(): string {
  return `<div class="pending">thinking&hellip;</div>`;
}
