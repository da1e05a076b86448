/**
 * Wire framing shared with the gateway: one canonical-JSON object per line.
 *
 * Canonical means minified JSON with lexicographically sorted keys in
 * UTF-8. The gateway's golden frames are byte-exact under these rules,
 * so an SDK that follows them interoperates with any other client.
 */

export type Json = null | boolean | number | string | Json[] | { [key: string]: Json };

export interface RequestFrame {
  id: number;
  method: string;
  params: Record<string, Json>;
}

export interface ErrorBody {
  code: string;
  message: string;
}

export interface ResponseFrame {
  id: number | null;
  result?: Record<string, Json>;
  error?: ErrorBody;
}

export interface ToolDescriptor {
  name: string;
  description: string;
  params_schema: {
    type: string;
    properties: Record<string, { type?: string; [k: string]: Json | undefined }>;
    required?: string[];
    /** Declaration order of parameters; object key order is not reliable on the wire. */
    param_order?: string[];
  };
  category: string;
}

export interface ToolResult {
  ok: boolean;
  content?: string;
  data?: Record<string, Json>;
  error?: ErrorBody;
  step?: number;
}

function sortValue(value: Json): Json {
  if (Array.isArray(value)) {
    return value.map(sortValue);
  }
  if (value !== null && typeof value === "object") {
    const sorted: { [key: string]: Json } = {};
    for (const key of Object.keys(value).sort()) {
      sorted[key] = sortValue((value as { [key: string]: Json })[key]);
    }
    return sorted;
  }
  return value;
}

/** Minified JSON with recursively sorted keys; matches the gateway byte for byte. */
export function canonicalJson(value: Json): string {
  return JSON.stringify(sortValue(value));
}

export function encodeFrame(frame: RequestFrame | ResponseFrame): string {
  return canonicalJson(frame as unknown as Json) + "\n";
}

export function decodeFrame(line: string): ResponseFrame {
  return JSON.parse(line) as ResponseFrame;
}

export function requestFrame(id: number, method: string, params: Record<string, Json> = {}): RequestFrame {
  return { id, method, params };
}
