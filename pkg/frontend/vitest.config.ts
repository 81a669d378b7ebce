import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // node by default; DOM-touching suites opt into happy-dom per file
    environment: "node",
    include: ["tests/**/*.test.ts"],
    testTimeout: 15000,
  },
});
