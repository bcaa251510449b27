// DOM wiring: one chat session, turns rendered in submission order,
// a single in-flight query at a time.

import { ApiError, FetchLike, getTools, postQuery } from "./api";
import { escapeHtml } from "./format";
import { renderAnswer, renderErrorNotice, renderPending } from "./render";
import { ChatTurn } from "./types";

export interface AppDeps {
  fetchFn?: FetchLike;
}

export class ChatApp {
  private readonly root: HTMLElement;
  private readonly fetchFn: FetchLike;
  private readonly turns: ChatTurn[] = [];
  private nextId = 1;
  private pending = false;

  private form!: HTMLFormElement;
  private input!: HTMLInputElement;
  private submitButton!: HTMLButtonElement;
  private toolSelect!: HTMLSelectElement;
  private turnsContainer!: HTMLElement;

  constructor(root: HTMLElement, deps: AppDeps = {}) {
    this.root = root;
    this.fetchFn = deps.fetchFn ?? ((input, init) => fetch(input, init));
    this.mount();
  }

  private mount(): void {
    this.root.innerHTML = `
      <header class="app-header">
        <h1>vidrag chat</h1>
        <p class="tagline">answers grounded in video moments</p>
      </header>
      <main class="turns" aria-live="polite"></main>
      <form class="query-form">
        <select class="tool-select" aria-label="retriever tool">
          <option value="">auto</option>
        </select>
        <input class="query-input" type="text" autocomplete="off"
               placeholder="ask about the video catalog" aria-label="query" />
        <button class="submit-button" type="submit" disabled>ask</button>
      </form>`;
    this.form = this.root.querySelector(".query-form") as HTMLFormElement;
    this.input = this.root.querySelector(".query-input") as HTMLInputElement;
    this.submitButton = this.root.querySelector(".submit-button") as HTMLButtonElement;
    this.toolSelect = this.root.querySelector(".tool-select") as HTMLSelectElement;
    this.turnsContainer = this.root.querySelector(".turns") as HTMLElement;

    this.input.addEventListener("input", () => this.syncControls());
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery(this.input.value);
    });
    void this.loadTools();
  }

  private async loadTools(): Promise<void> {
    try {
      const tools = await getTools(this.fetchFn);
      for (const tool of tools) {
        const option = document.createElement("option");
        option.value = tool.tool_id;
        option.textContent = `${tool.tool_id} (${tool.video_count} videos)`;
        option.title = tool.description;
        this.toolSelect.appendChild(option);
      }
    } catch {
      // tools listing is a convenience; auto-routing still works without it
    }
  }

  private syncControls(): void {
    this.submitButton.disabled = this.pending || this.input.value.trim() === "";
    this.input.disabled = this.pending;
  }

  async submitQuery(text: string): Promise<void> {
    const query = text.trim();
    if (!query || this.pending) {
      return;
    }
    const turn: ChatTurn = {
      id: this.nextId++,
      query,
      tool: this.toolSelect.value,
      status: "pending",
      timestamp: Date.now(),
    };
    this.turns.push(turn);
    this.pending = true;
    this.input.value = "";
    this.syncControls();
    this.renderTurns();

    try {
      const request: { query: string; tool?: string } = { query };
      if (turn.tool) {
        request.tool = turn.tool; // "auto" omits the field: server routes
      }
      turn.response = await postQuery(request, this.fetchFn);
      turn.status = "ok";
    } catch (err) {
      turn.status = "error";
      turn.error = err instanceof ApiError ? err.message : String(err);
    } finally {
      this.pending = false;
      this.syncControls();
      this.renderTurns();
    }
  }

  private renderTurns(): void {
    this.turnsContainer.innerHTML = this.turns
      .map((turn) => {
        let body: string;
        if (turn.status === "pending") {
          body = renderPending();
        } else if (turn.status === "ok" && turn.response) {
          body = renderAnswer(turn.response);
        } else {
          body = renderErrorNotice(turn.error ?? "request failed");
        }
        return (
          `<section class="turn" data-turn-id="${turn.id}">` +
          `<div class="user-query">${escapeHtml(turn.query)}</div>` +
          body +
          `</section>`
        );
      })
      .join("");
    for (const section of Array.from(this.turnsContainer.querySelectorAll(".turn"))) {
      const button = section.querySelector(".retry-button");
      if (button) {
        const id = Number(section.getAttribute("data-turn-id"));
        button.addEventListener("click", () => this.retry(id));
      }
    }
    this.turnsContainer.scrollTop = this.turnsContainer.scrollHeight;
  }

  private retry(turnId: number): void {
    const failed = this.turns.find((t) => t.id === turnId);
    if (!failed || this.pending) {
      return;
    }
    this.toolSelect.value = failed.tool;
    void this.submitQuery(failed.query);
  }

  turnCount(): number {
    return this.turns.length;
  }

  isPending(): boolean {
    return this.pending;
  }
}

export function createApp(root: HTMLElement, deps: AppDeps = {}): ChatApp {
  return new ChatApp(root, deps);
}
