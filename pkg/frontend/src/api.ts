// Thin HTTP layer. XML bodies come back as text; parsing lives in
// projection.ts so this file stays browser-glue only.

import { parseEventLine, PlatformEvent } from "./types.js";

export class ApiConflict extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

async function check(response: Response): Promise<Response> {
  if (response.ok) return response;
  const body = await response.text();
  const code = /code="([^"]*)"/.exec(body)?.[1] ?? "error";
  const message = /message="([^"]*)"/.exec(body)?.[1] ?? response.statusText;
  throw new ApiConflict(code, message);
}

export class HttpApi {
  constructor(private base: string = "") {}

  private async getText(path: string): Promise<string> {
    return (await check(await fetch(this.base + path))).text();
  }

  experimentsXml(): Promise<string> {
    return this.getText("/experiments");
  }

  statusXml(experimentId: string): Promise<string> {
    return this.getText(`/experiments/${encodeURIComponent(experimentId)}`);
  }

  jobXml(jobId: string): Promise<string> {
    return this.getText(`/jobs/${encodeURIComponent(jobId)}`);
  }

  async createExperiment(manifestXml: string): Promise<string> {
    const response = await check(
      await fetch(this.base + "/experiments", { method: "POST", body: manifestXml }),
    );
    const body = await response.text();
    return /id="([^"]*)"/.exec(body)![1];
  }

  async start(experimentId: string): Promise<void> {
    await check(
      await fetch(`${this.base}/experiments/${encodeURIComponent(experimentId)}/start`, {
        method: "POST",
      }),
    );
  }

  async pause(experimentId: string): Promise<void> {
    await check(
      await fetch(`${this.base}/experiments/${encodeURIComponent(experimentId)}/pause`, {
        method: "POST",
      }),
    );
  }

  async resubmit(jobId: string): Promise<void> {
    await check(
      await fetch(`${this.base}/jobs/${encodeURIComponent(jobId)}/resubmit`, { method: "POST" }),
    );
  }

  // SSE subscription, resumable by sequence number. Returns a stop
  // function; onDrop fires when the stream ends so the caller can fall
  // back to polling and reconnect from the last seen seq.
  subscribe(
    since: number,
    onEvent: (event: PlatformEvent) => void,
    onDrop: () => void,
  ): () => void {
    const source = new EventSource(`${this.base}/events?since=${since}`);
    source.onmessage = (msg) => onEvent(parseEventLine(msg.data));
    source.onerror = () => {
      source.close();
      onDrop();
    };
    return () => source.close();
  }
}
