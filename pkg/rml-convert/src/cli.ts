#!/usr/bin/env node
import { convert, ValidationError } from "./convert.js";

function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: rml-convert <in.npz> <out.iqds>");
    return 2;
  }
  const [input, output] = argv;
  try {
    const summary = convert(input, output);
    console.log(
      `wrote ${summary.framesWritten} frames ` +
        `(${summary.mods.length} mods x ${summary.snrs.length} SNRs) to ${output}`
    );
    console.log(`mods: ${summary.mods.join(", ")}`);
    console.log(`snrs: ${summary.snrs.join(", ")}`);
    return 0;
  } catch (e) {
    if (e instanceof ValidationError) {
      console.error(`validation error: ${e.message}`);
    } else {
      console.error(`error: ${(e as Error).message}`);
    }
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
