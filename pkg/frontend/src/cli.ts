#!/usr/bin/env node
/**
 * Usage: spzf-figures render --spec <figures.json> --out <dir>
 */
import { pathToFileURL } from "url";

import { renderAll } from "./render.js";

function usage(): string {
  return "usage: spzf-figures render --spec <figures.json> --out <dir>";
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error(usage());
    return 2;
  }
  let specPath: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      console.error(usage());
      return 2;
    }
    if (flag === "--spec") specPath = value;
    else if (flag === "--out") outDir = value;
    else {
      console.error(`unknown flag ${flag}\n${usage()}`);
      return 2;
    }
  }
  if (!specPath || !outDir) {
    console.error(usage());
    return 2;
  }
  try {
    const written = await renderAll(specPath, outDir);
    for (const file of written) {
      console.log(`wrote ${file}`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
