/** Serialized request queue: one in-flight request per session, strictly in
 * submission order. The server serializes mutations anyway; queueing on the
 * client keeps revisions monotone from the UI's point of view and makes
 * "await the server revision, never guess" possible. */

export class RequestQueue {
  private tail: Promise<unknown> = Promise.resolve();
  private pending = 0;

  /** Run the job after everything enqueued before it, failures included. */
  enqueue<T>(job: () => Promise<T>): Promise<T> {
    this.pending += 1;
    const settle = () => {
      this.pending -= 1;
    };
    const next = this.tail.then(job, job);
    this.tail = next.then(settle, settle);
    return next;
  }

  get size(): number {
    return this.pending;
  }

  get idle(): boolean {
    return this.pending === 0;
  }

  /** Resolves once everything currently enqueued has settled. */
  async drain(): Promise<void> {
    while (!this.idle) {
      await this.tail;
    }
  }
}
