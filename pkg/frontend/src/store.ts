/** Session state container with the UI's ordering guarantees.

Invariants enforced here: summaries from older revisions are discarded
(the view never goes back in time), mutations run one at a time, and
while a mutation is in flight the store polls the service every 500 ms
so long-running operations still refresh the view.
*/

import type { ServiceClient } from "./api.js";
import type { StateSummary } from "./types.js";

export type StoreListener = (state: StateSummary) => void;

interface StateSource {
  getState(id: string): Promise<StateSummary>;
}

export class UiStore {
  state: StateSummary | null = null;
  private pendingCount = 0;
  private queue: Promise<unknown> = Promise.resolve();
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private listeners: StoreListener[] = [];

  constructor(
    private readonly client: ServiceClient & StateSource,
    private readonly pollMs = 500,
  ) {}

  get sessionId(): string | null {
    return this.state?.session ?? null;
  }

  get isPending(): boolean {
    return this.pendingCount > 0;
  }

  subscribe(listener: StoreListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  /** Adopt a summary unless it is older than what is already shown. */
  apply(summary: StateSummary): boolean {
    if (
      this.state &&
      summary.session === this.state.session &&
      summary.revision < this.state.revision
    ) {
      return false;
    }
    this.state = summary;
    for (const listener of [...this.listeners]) listener(summary);
    return true;
  }

  /** Run one mutation; concurrent calls queue behind it in order. */
  mutate(
    fn: (client: ServiceClient, sessionId: string) => Promise<StateSummary>,
  ): Promise<StateSummary> {
    const run = async (): Promise<StateSummary> => {
      const id = this.sessionId;
      if (!id) throw new Error("no active session");
      this.pendingCount += 1;
      this.startPolling(id);
      try {
        const summary = await fn(this.client, id);
        this.apply(summary);
        return summary;
      } finally {
        this.pendingCount -= 1;
        if (this.pendingCount === 0) this.stopPolling();
      }
    };
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined); // keep the chain alive on errors
    return next;
  }

  private startPolling(id: string): void {
    if (this.pollTimer != null) return;
    this.pollTimer = setInterval(() => {
      this.client.getState(id).then(
        (summary) => this.apply(summary),
        () => undefined, // transient poll failures are invisible
      );
    }, this.pollMs);
  }

  private stopPolling(): void {
    if (this.pollTimer != null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }
}
