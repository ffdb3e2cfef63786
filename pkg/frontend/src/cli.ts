#!/usr/bin/env node
// render --fig figN --in <dir> --out <file.png|svg>

import { render } from "./render";

function usage(): never {
  console.error("usage: render --fig figN --in <dir> --out <file.png|svg>");
  process.exit(2);
}

function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let k = 0; k < argv.length; k += 2) {
    const flag = argv[k];
    const value = argv[k + 1];
    if (!flag?.startsWith("--") || value === undefined) usage();
    args.set(flag.slice(2), value);
  }
  const figure = args.get("fig");
  const inDir = args.get("in");
  const outPath = args.get("out");
  if (!figure || !inDir || !outPath) usage();
  try {
    const written = render({ figure, inDir, outPath });
    console.log(written);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
