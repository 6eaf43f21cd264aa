import { mkdtemp, readFile, writeFile } from "fs/promises";
import { tmpdir } from "os";
import path from "path";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { renderAll } from "../src/render.js";
import { CSV_HEADER } from "../src/schema.js";

function outageCsv(): string {
  const lines = [CSV_HEADER];
  for (const algo of ["random-fc", "iterative", "genetic"]) {
    for (const m of [3, 4, 5, 6]) {
      const v = (algo === "random-fc" ? 0.08 : 0.03) * m;
      lines.push(`1,outage,${algo},rayleigh,20,${m},,,pr_outage,${v},0.004,10000,7,`);
    }
  }
  return lines.join("\n") + "\n";
}

function secrecyCsv(): string {
  const lines = [CSV_HEADER];
  for (const algo of ["random-fc", "iterative"]) {
    for (const snr of [0, 10, 20, 30]) {
      const v = (algo === "iterative" ? 0.07 : 0.05) * snr + 0.4;
      lines.push(
        `1,secrecy,${algo},rayleigh,20,4,5,${snr},rate_min,${v},0.02,1000,7,`
      );
    }
  }
  return lines.join("\n") + "\n";
}

async function workspace(): Promise<string> {
  return mkdtemp(path.join(tmpdir(), "spzf-figures-"));
}

describe("renderAll", () => {
  it("renders outage and secrecy figures with error bars", async () => {
    const dir = await workspace();
    await writeFile(path.join(dir, "outage.csv"), outageCsv());
    await writeFile(path.join(dir, "secrecy.csv"), secrecyCsv());
    const spec = {
      figures: [
        {
          id: "outage-vs-m",
          csv: ["outage.csv"],
          x: "m",
          metric: "pr_outage",
          yscale: "log",
          series: ["algo"],
          out: "outage.svg",
        },
        {
          id: "secrecy-vs-snr",
          csv: ["secrecy.csv"],
          x: "snr_db",
          metric: "rate_min",
          yscale: "linear",
          series: ["algo"],
          out: "secrecy.svg",
        },
      ],
    };
    const specPath = path.join(dir, "figures.json");
    await writeFile(specPath, JSON.stringify(spec));
    const written = await renderAll(specPath, path.join(dir, "out"));
    expect(written).toHaveLength(2);

    const outage = await readFile(written[0], "utf-8");
    expect(outage).toContain("<svg");
    expect(outage).toContain("error-bar");
    expect(outage).toContain("1e-1"); // log decade tick label
    expect((outage.match(/<path /g) ?? []).length).toBe(3); // one line per algo

    const secrecy = await readFile(written[1], "utf-8");
    expect(secrecy).toContain("<svg");
    expect(secrecy).toContain("SNR (dB)");
  });

  it("is idempotent: identical CSVs give identical plots", async () => {
    const dir = await workspace();
    await writeFile(path.join(dir, "outage.csv"), outageCsv());
    const spec = {
      figures: [
        {
          id: "outage-vs-m",
          csv: ["outage.csv"],
          x: "m",
          metric: "pr_outage",
          yscale: "log",
          series: ["algo"],
          out: "outage.svg",
        },
      ],
    };
    const specPath = path.join(dir, "figures.json");
    await writeFile(specPath, JSON.stringify(spec));
    const [first] = await renderAll(specPath, path.join(dir, "out1"));
    const [second] = await renderAll(specPath, path.join(dir, "out2"));
    expect(await readFile(first, "utf-8")).toBe(await readFile(second, "utf-8"));
  });
});

describe("cli", () => {
  it("renders via the render subcommand", async () => {
    const dir = await workspace();
    await writeFile(path.join(dir, "outage.csv"), outageCsv());
    const spec = {
      figures: [
        {
          id: "outage-vs-m",
          csv: ["outage.csv"],
          x: "m",
          metric: "pr_outage",
          yscale: "log",
          series: ["algo"],
          out: "outage.svg",
        },
      ],
    };
    const specPath = path.join(dir, "figures.json");
    await writeFile(specPath, JSON.stringify(spec));
    const code = await main(["render", "--spec", specPath, "--out", path.join(dir, "o")]);
    expect(code).toBe(0);
  });

  it("exits non-zero on schema mismatch", async () => {
    const dir = await workspace();
    await writeFile(
      path.join(dir, "outage.csv"),
      outageCsv().replace("stderr", "std_err")
    );
    const spec = {
      figures: [
        {
          id: "broken",
          csv: ["outage.csv"],
          x: "m",
          metric: "pr_outage",
          yscale: "log",
          series: ["algo"],
          out: "x.svg",
        },
      ],
    };
    const specPath = path.join(dir, "figures.json");
    await writeFile(specPath, JSON.stringify(spec));
    const code = await main(["render", "--spec", specPath, "--out", path.join(dir, "o")]);
    expect(code).toBe(1);
  });

  it("exits non-zero on an empty CSV", async () => {
    const dir = await workspace();
    await writeFile(path.join(dir, "outage.csv"), CSV_HEADER + "\n");
    const spec = {
      figures: [
        {
          id: "empty",
          csv: ["outage.csv"],
          x: "m",
          metric: "pr_outage",
          yscale: "log",
          series: ["algo"],
          out: "x.svg",
        },
      ],
    };
    const specPath = path.join(dir, "figures.json");
    await writeFile(specPath, JSON.stringify(spec));
    const code = await main(["render", "--spec", specPath, "--out", path.join(dir, "o")]);
    expect(code).toBe(1);
  });

  it("rejects bad usage", async () => {
    expect(await main([])).toBe(2);
    expect(await main(["render", "--spec"])).toBe(2);
    expect(await main(["plot", "--spec", "x", "--out", "y"])).toBe(2);
  });
});
