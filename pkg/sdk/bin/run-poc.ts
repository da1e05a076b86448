/**
 * Offline demo: connect to a served scenario and let the reference agent
 * replay the bundled transcript.
 *
 *   netgym serve lossy-link-s1-s3 --endpoint 127.0.0.1:7777   # terminal 1
 *   npm run poc -- 127.0.0.1 7777                             # terminal 2
 *
 * Pass --live <endpoint> <model> to use a real chat-completion service
 * instead of the canned transcript.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { GatewayClient } from "../src/client.js";
import { CannedCompletions, CompletionProvider, HttpCompletions, exampleReactAgent } from "../src/react.js";

async function main(): Promise<number> {
  const args = process.argv.slice(2);
  const host = args[0] ?? "127.0.0.1";
  const port = Number.parseInt(args[1] ?? "7777", 10);

  let provider: CompletionProvider;
  const liveIndex = args.indexOf("--live");
  if (liveIndex >= 0) {
    const endpoint = args[liveIndex + 1];
    const model = args[liveIndex + 2] ?? "default";
    if (!endpoint) {
      console.error("--live needs a chat-completion endpoint (and optionally a model name)");
      return 2;
    }
    provider = new HttpCompletions(endpoint, model, process.env.NETGYM_API_KEY);
  } else {
    const here = dirname(fileURLToPath(import.meta.url));
    const transcript = JSON.parse(
      readFileSync(join(here, "..", "..", "transcripts", "poc.json"), "utf-8"),
    ) as string[];
    provider = new CannedCompletions(transcript);
  }

  const client = await GatewayClient.connect(host, port);
  try {
    const run = await exampleReactAgent(client, provider, { log: (line) => console.error(line) });
    console.log(JSON.stringify(run.report, null, 2));
    const detection = run.report.detection_correct === true;
    const localization = run.report.localization_correct === true;
    return run.outcome === "submitted" && detection && localization ? 0 : 1;
  } finally {
    client.close();
  }
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(String(err));
    process.exit(2);
  },
);
