/**
 * Reference ReAct agent: User -> Thought -> Action -> Observation loop
 * against the gateway, with pluggable completion sources. The canned
 * source replays a fixed transcript for offline demos; the HTTP source
 * speaks the common chat-completions shape.
 */

import { GatewayClient } from "./client.js";
import { Json, ToolDescriptor } from "./wire.js";

export interface Message {
  role: "user" | "assistant" | "system";
  content: string;
}

export interface CompletionProvider {
  complete(history: Message[]): Promise<string>;
}

export class CannedCompletions implements CompletionProvider {
  private cursor = 0;
  constructor(private replies: string[]) {}

  async complete(_history: Message[]): Promise<string> {
    if (this.cursor >= this.replies.length) {
      throw new Error("canned transcript exhausted without submitting findings");
    }
    return this.replies[this.cursor++];
  }
}

export class HttpCompletions implements CompletionProvider {
  constructor(
    private endpoint: string,
    private model: string,
    private apiKey?: string,
    private timeoutMs = 60_000,
  ) {}

  async complete(history: Message[]): Promise<string> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.apiKey) headers.Authorization = `Bearer ${this.apiKey}`;
    let lastError: unknown;
    for (let attempt = 0; attempt < 2; attempt++) {
      try {
        const response = await fetch(`${this.endpoint.replace(/\/$/, "")}/chat/completions`, {
          method: "POST",
          headers,
          body: JSON.stringify({ model: this.model, messages: history }),
          signal: AbortSignal.timeout(this.timeoutMs),
        });
        if (!response.ok) throw new Error(`completion service returned ${response.status}`);
        const payload = (await response.json()) as { choices: { message: { content: string } }[] };
        return payload.choices[0].message.content;
      } catch (err) {
        lastError = err;
      }
    }
    throw new Error(`completion service failed twice: ${String(lastError)}`);
  }
}

export interface ParsedTurn {
  thought: string | null;
  name: string;
  positional: Json[];
  keywords: Record<string, Json>;
}

/** Tokenizer for name(arg, key=value, ...) with strings, ints, bools, lists. */
class CallParser {
  private pos = 0;
  constructor(private text: string) {}

  parse(): { name: string; positional: Json[]; keywords: Record<string, Json> } {
    const name = this.identifier();
    this.expect("(");
    const positional: Json[] = [];
    const keywords: Record<string, Json> = {};
    this.ws();
    if (this.peek() !== ")") {
      for (;;) {
        this.ws();
        const save = this.pos;
        let key: string | null = null;
        if (/[A-Za-z_]/.test(this.peek())) {
          const word = this.identifier();
          this.ws();
          if (this.peek() === "=") {
            this.pos++;
            key = word;
          } else {
            this.pos = save;
          }
        }
        const value = this.value();
        if (key !== null) {
          keywords[key] = value;
        } else if (Object.keys(keywords).length > 0) {
          throw new Error("positional argument after keyword argument");
        } else {
          positional.push(value);
        }
        this.ws();
        if (this.peek() === ",") {
          this.pos++;
          continue;
        }
        break;
      }
    }
    this.expect(")");
    this.ws();
    if (this.pos !== this.text.length) throw new Error(`trailing text after call: ${this.text.slice(this.pos)}`);
    return { name, positional, keywords };
  }

  private peek(): string {
    return this.text[this.pos] ?? "";
  }

  private ws(): void {
    while (/\s/.test(this.peek())) this.pos++;
  }

  private expect(ch: string): void {
    this.ws();
    if (this.peek() !== ch) throw new Error(`expected '${ch}' at ${this.pos}`);
    this.pos++;
  }

  private identifier(): string {
    this.ws();
    const match = /^[A-Za-z_][A-Za-z0-9_]*/.exec(this.text.slice(this.pos));
    if (!match) throw new Error(`expected identifier at ${this.pos}`);
    this.pos += match[0].length;
    return match[0];
  }

  private value(): Json {
    this.ws();
    const ch = this.peek();
    if (ch === "'" || ch === '"') return this.stringLiteral(ch);
    if (ch === "[") {
      this.pos++;
      const items: Json[] = [];
      this.ws();
      if (this.peek() !== "]") {
        for (;;) {
          items.push(this.value());
          this.ws();
          if (this.peek() === ",") {
            this.pos++;
            continue;
          }
          break;
        }
      }
      this.expect("]");
      return items;
    }
    if (/[-0-9]/.test(ch)) {
      const match = /^-?\d+(\.\d+)?/.exec(this.text.slice(this.pos));
      if (!match) throw new Error(`bad number at ${this.pos}`);
      this.pos += match[0].length;
      return match[1] ? Number.parseFloat(match[0]) : Number.parseInt(match[0], 10);
    }
    const word = this.identifier();
    if (word === "true" || word === "True") return true;
    if (word === "false" || word === "False") return false;
    if (word === "null" || word === "None") return null;
    throw new Error(`unsupported literal ${word}`);
  }

  private stringLiteral(quote: string): string {
    this.pos++;
    let out = "";
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === "\\") {
        const next = this.text[this.pos + 1];
        out += next === "n" ? "\n" : next === "t" ? "\t" : next;
        this.pos += 2;
        continue;
      }
      if (ch === quote) {
        this.pos++;
        return out;
      }
      out += ch;
      this.pos++;
    }
    throw new Error("unterminated string literal");
  }
}

const ACTION_RE = /^[ \t>*`]*\**\s*Action\s*\**\s*:\s*(.+?)\s*$/gimd;
const THOUGHT_RE = /^[ \t>*`]*\**\s*Thought\s*\**\s*:\s*(.*?)\s*$/gimd;

/** Extract the last Thought/Action pair; throws when no action parses. */
export function parseReact(text: string): ParsedTurn {
  const actions = [...text.matchAll(ACTION_RE)];
  if (actions.length === 0) throw new Error("no 'Action:' line found");
  const action = actions[actions.length - 1];
  const call = new CallParser(action[1].replace(/^`|`$/g, "")).parse();

  const thoughts = [...text.matchAll(THOUGHT_RE)].filter((m) => (m.index ?? 0) < (action.index ?? 0));
  let thought: string | null = null;
  if (thoughts.length > 0) {
    const last = thoughts[thoughts.length - 1];
    // The thought runs from its capture start up to the action line.
    const captureStart = last.indices?.[1]?.[0] ?? (last.index ?? 0) + last[0].length;
    thought = text.slice(captureStart, action.index).trim() || null;
  }
  return { thought, name: call.name, positional: call.positional, keywords: call.keywords };
}

/** Bind positional arguments to the tool's declared parameter order. */
export function bindArgs(descriptor: ToolDescriptor | undefined, turn: ParsedTurn): Record<string, Json> {
  const names = descriptor
    ? descriptor.params_schema.param_order ?? Object.keys(descriptor.params_schema.properties)
    : [];
  if (turn.positional.length > names.length) {
    throw new Error(`too many positional arguments for ${turn.name}`);
  }
  const args: Record<string, Json> = {};
  turn.positional.forEach((value, i) => {
    args[names[i]] = value;
  });
  for (const [key, value] of Object.entries(turn.keywords)) {
    if (key in args) throw new Error(`argument ${key} given twice`);
    args[key] = value;
  }
  return args;
}

export interface AgentRunResult {
  outcome: string;
  steps: number;
  report: Record<string, Json>;
}

const FORMAT_REMINDER =
  "Your reply could not be parsed. End your reply with exactly one line of the form\n" +
  "Action: tool_name(arg1, arg2, ...)\n" +
  "with quoted strings and plain integers, optionally preceded by a 'Thought:' line.";

/**
 * Drive one full session: open, prompt, loop completions into tool calls
 * until findings are submitted or the budget runs out, then close.
 */
export async function exampleReactAgent(
  client: GatewayClient,
  provider: CompletionProvider,
  options: { maxSteps?: number; log?: (line: string) => void } = {},
): Promise<AgentRunResult> {
  const log = options.log ?? (() => {});
  const info = await client.open();
  const tools = await client.listTools();
  const budget = Math.min(info.step_budget, options.maxSteps ?? info.step_budget);

  const toolDocs = tools
    .map((t) => `- ${t.name}(${Object.keys(t.params_schema.properties).join(", ")}): ${t.description}`)
    .join("\n");
  const history: Message[] = [
    {
      role: "user",
      content:
        `${info.task_intent.trim()}\n\n` +
        `Network topology:\n${info.topology}\n\n` +
        `You can interact with the network through these tools:\n${toolDocs}`,
    },
  ];

  let steps = 0;
  let sealed = false;
  for (let turnIndex = 0; turnIndex < budget && !sealed; turnIndex++) {
    let completion = await provider.complete(history);
    let turn: ParsedTurn;
    try {
      turn = parseReact(completion);
    } catch {
      history.push({ role: "assistant", content: completion });
      history.push({ role: "user", content: FORMAT_REMINDER });
      completion = await provider.complete(history);
      try {
        turn = parseReact(completion);
      } catch {
        history.push({ role: "assistant", content: completion });
        history.push({ role: "user", content: FORMAT_REMINDER });
        continue; // the turn is spent
      }
    }

    const args = bindArgs(client.descriptor(turn.name), turn);
    const result = await client.call(turn.name, args, turn.thought ?? undefined);
    steps += 1;
    const observation = result.ok
      ? result.content ?? ""
      : `ERROR[${result.error?.code}]: ${result.error?.message}`;
    log(`step ${steps}: ${turn.name} -> ${observation.split("\n")[0]}`);
    history.push({ role: "assistant", content: completion });
    history.push({ role: "user", content: `Observation: ${observation}` });
    if (turn.name === "submit_findings" && result.ok) sealed = true;
  }

  const closed = await client.closeSession();
  return { outcome: closed.outcome, steps, report: closed.report };
}
