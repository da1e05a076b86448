import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { canonicalJson, encodeFrame, requestFrame } from "../src/wire.js";
import { bindArgs, parseReact } from "../src/react.js";

const here = dirname(fileURLToPath(import.meta.url));
const GOLDEN = join(here, "..", "..", "goldens", "wire", "poc_session.ndjson");

describe("canonical JSON", () => {
  it("sorts keys recursively and minifies", () => {
    expect(canonicalJson({ b: 1, a: { d: [2, { z: 0, y: 1 }], c: true } })).toBe(
      '{"a":{"c":true,"d":[2,{"y":1,"z":0}]},"b":1}',
    );
  });

  it("re-encodes every golden frame byte for byte", () => {
    const lines = readFileSync(GOLDEN, "utf-8").trim().split("\n");
    expect(lines.length).toBeGreaterThan(0);
    for (const line of lines) {
      expect(canonicalJson(JSON.parse(line))).toBe(line);
    }
  });

  it("builds request frames that match the golden request lines", () => {
    const lines = readFileSync(GOLDEN, "utf-8").trim().split("\n");
    for (let i = 0; i < lines.length; i += 2) {
      const parsed = JSON.parse(lines[i]) as { id: number; method: string; params: Record<string, never> };
      const rebuilt = encodeFrame(requestFrame(parsed.id, parsed.method, parsed.params));
      expect(rebuilt).toBe(lines[i] + "\n");
    }
  });
});

describe("ReAct parsing", () => {
  it("parses bare calls", () => {
    const turn = parseReact("Thought: look\nAction: test_reachability()");
    expect(turn.name).toBe("test_reachability");
    expect(turn.positional).toEqual([]);
    expect(turn.thought).toBe("look");
  });

  it("parses positional and keyword arguments", () => {
    const turn = parseReact(
      "Action: bmv2_counter_read(\"s1\", 'MyEgress.egress_port_counter', index=3)",
    );
    expect(turn.positional).toEqual(["s1", "MyEgress.egress_port_counter"]);
    expect(turn.keywords).toEqual({ index: 3 });
  });

  it("parses lists and booleans in submit_findings", () => {
    const turn = parseReact(
      "Action: submit_findings(detected=true, suspects=['link:s1-s3', 's3'], explanation='one-way')",
    );
    expect(turn.keywords).toEqual({
      detected: true,
      suspects: ["link:s1-s3", "s3"],
      explanation: "one-way",
    });
  });

  it("takes the last Thought/Action pair", () => {
    const turn = parseReact(
      "Thought: a\nAction: get_topology()\nObservation: x\nThought: b\nAction: test_reachability()",
    );
    expect(turn.name).toBe("test_reachability");
    expect(turn.thought).toBe("b");
  });

  it("throws on text without an action", () => {
    expect(() => parseReact("I think it's s3")).toThrow();
  });

  it("binds positionals against a descriptor", () => {
    const descriptor = {
      name: "bmv2_counter_read",
      description: "",
      category: "data_adapter",
      params_schema: {
        type: "object",
        // Deliberately alphabetized properties, as the wire delivers them;
        // param_order must win.
        properties: { counter: { type: "string" }, index: { type: "integer" }, switch: { type: "string" } },
        required: ["switch", "counter", "index"],
        param_order: ["switch", "counter", "index"],
      },
    };
    const turn = parseReact("Action: bmv2_counter_read('s1', 'c', 3)");
    expect(bindArgs(descriptor, turn)).toEqual({ switch: "s1", counter: "c", index: 3 });
  });
});
