/**
 * GatewayClient: a thin session handle over the newline-delimited frame
 * protocol. The SDK contains no simulation logic; every semantic lives
 * on the far side of the wire, so client version skew cannot change
 * benchmark results.
 */

import * as net from "node:net";

import {
  Json,
  ResponseFrame,
  ToolDescriptor,
  ToolResult,
  encodeFrame,
  requestFrame,
} from "./wire.js";

export class GatewayError extends Error {
  constructor(public code: string, message: string) {
    super(message);
    this.name = "GatewayError";
  }
}

export interface SessionInfo {
  session: string;
  scenario: string;
  step_budget: number;
  task_intent: string;
  topology: string;
}

export interface CloseInfo {
  closed: boolean;
  outcome: string;
  report: Record<string, Json>;
}

export class GatewayClient {
  private nextId = 0;
  private buffer = "";
  private pending = new Map<number, { resolve: (f: ResponseFrame) => void; reject: (e: Error) => void }>();
  private sessionId: string | null = null;
  private closed = false;

  /** Tool callables keyed by name, populated by listTools(). */
  readonly tools = new Map<string, (args?: Record<string, Json>) => Promise<ToolResult>>();
  private descriptors: ToolDescriptor[] = [];

  private constructor(private socket: net.Socket) {
    socket.on("data", (chunk) => this.onData(chunk));
    socket.on("error", (err) => this.failAll(err));
    socket.on("close", () => this.failAll(new Error("connection closed")));
  }

  static connect(host: string, port: number, timeoutMs = 10_000): Promise<GatewayClient> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port });
      const timer = setTimeout(() => {
        socket.destroy();
        reject(new Error(`connect timeout to ${host}:${port}`));
      }, timeoutMs);
      socket.once("connect", () => {
        clearTimeout(timer);
        resolve(new GatewayClient(socket));
      });
      socket.once("error", (err) => {
        clearTimeout(timer);
        reject(err);
      });
    });
  }

  private onData(chunk: Buffer): void {
    this.buffer += chunk.toString("utf-8");
    let newline;
    while ((newline = this.buffer.indexOf("\n")) >= 0) {
      const line = this.buffer.slice(0, newline);
      this.buffer = this.buffer.slice(newline + 1);
      if (!line.trim()) continue;
      const frame = JSON.parse(line) as ResponseFrame;
      const waiter = frame.id === null ? undefined : this.pending.get(frame.id as number);
      if (waiter) {
        this.pending.delete(frame.id as number);
        waiter.resolve(frame);
      }
    }
  }

  private failAll(err: Error): void {
    for (const waiter of this.pending.values()) waiter.reject(err);
    this.pending.clear();
  }

  request(method: string, params: Record<string, Json> = {}): Promise<Record<string, Json>> {
    const id = ++this.nextId;
    const frame = requestFrame(id, method, params);
    return new Promise((resolve, reject) => {
      this.pending.set(id, {
        resolve: (response) => {
          if (response.error) {
            reject(new GatewayError(response.error.code, response.error.message));
          } else {
            resolve(response.result ?? {});
          }
        },
        reject,
      });
      this.socket.write(encodeFrame(frame));
    });
  }

  async open(): Promise<SessionInfo> {
    const result = (await this.request("session/open")) as unknown as SessionInfo;
    this.sessionId = result.session;
    return result;
  }

  get session(): string {
    if (this.sessionId === null) throw new GatewayError("no_session", "call open() first");
    return this.sessionId;
  }

  /** Fetch descriptors and expose each tool as a callable. */
  async listTools(): Promise<ToolDescriptor[]> {
    const params: Record<string, Json> = this.sessionId ? { session: this.sessionId } : {};
    const result = await this.request("tools/list", params);
    this.descriptors = result.tools as unknown as ToolDescriptor[];
    this.tools.clear();
    for (const descriptor of this.descriptors) {
      this.tools.set(descriptor.name, (args = {}) => this.call(descriptor.name, args));
    }
    return this.descriptors;
  }

  descriptor(name: string): ToolDescriptor | undefined {
    return this.descriptors.find((d) => d.name === name);
  }

  async call(name: string, args: Record<string, Json> = {}, thought?: string): Promise<ToolResult> {
    const params: Record<string, Json> = { session: this.session, name, arguments: args };
    if (thought !== undefined) params.thought = thought;
    return (await this.request("tools/call", params)) as unknown as ToolResult;
  }

  async submitFindings(findings: {
    detected: boolean;
    suspects?: string[];
    explanation?: string;
  }): Promise<ToolResult> {
    return this.call("submit_findings", findings as unknown as Record<string, Json>);
  }

  async closeSession(): Promise<CloseInfo> {
    const info = (await this.request("session/close", { session: this.session })) as unknown as CloseInfo;
    this.sessionId = null;
    return info;
  }

  /** Idempotent transport shutdown. */
  close(): void {
    if (this.closed) return;
    this.closed = true;
    this.socket.end();
    this.socket.destroy();
  }
}
