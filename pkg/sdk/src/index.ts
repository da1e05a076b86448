export {
  canonicalJson,
  decodeFrame,
  encodeFrame,
  requestFrame,
} from "./wire.js";
export type { Json, RequestFrame, ResponseFrame, ToolDescriptor, ToolResult } from "./wire.js";
export { GatewayClient, GatewayError } from "./client.js";
export type { CloseInfo, SessionInfo } from "./client.js";
export {
  CannedCompletions,
  HttpCompletions,
  bindArgs,
  exampleReactAgent,
  parseReact,
} from "./react.js";
export type { AgentRunResult, CompletionProvider, Message, ParsedTurn } from "./react.js";
