// Spawns `python3 -m tcnfx serve --port 0` and hands back the address it
// announces, plus a kill switch for teardown.

import { type ChildProcess, spawn } from "node:child_process";

export const PYTHON = process.env.TCNFX_PYTHON ?? "python3";

export type ServeHandle = {
  proc: ChildProcess;
  host: string;
  port: number;
  stderr: () => string;
  stop: () => void;
};

export function startServe(flags: string[] = [], timeoutMs = 30000): Promise<ServeHandle> {
  return new Promise((resolve, reject) => {
    const proc = spawn(PYTHON, ["-m", "tcnfx", "serve", "--port", "0", ...flags], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let stdout = "";
    let stderrText = "";
    let settled = false;
    const timer = setTimeout(() => {
      if (!settled) {
        settled = true;
        proc.kill("SIGKILL");
        reject(new Error(`serve did not announce a port within ${timeoutMs} ms\n${stderrText}`));
      }
    }, timeoutMs);

    proc.stderr!.on("data", (chunk: Buffer) => {
      stderrText += chunk.toString();
    });
    proc.stdout!.on("data", (chunk: Buffer) => {
      stdout += chunk.toString();
      const match = /listening on ws:\/\/([0-9.]+):(\d+)/.exec(stdout);
      if (match && !settled) {
        settled = true;
        clearTimeout(timer);
        resolve({
          proc,
          host: match[1]!,
          port: Number(match[2]!),
          stderr: () => stderrText,
          stop: () => proc.kill("SIGKILL"),
        });
      }
    });
    proc.on("exit", (code) => {
      if (!settled) {
        settled = true;
        clearTimeout(timer);
        reject(new Error(`serve exited with code ${code} before listening\n${stderrText}`));
      }
    });
    proc.on("error", (err) => {
      if (!settled) {
        settled = true;
        clearTimeout(timer);
        reject(err);
      }
    });
  });
}
