import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
  },
  server: {
    // `npm run dev` serves index.html and proxies API calls to a running
    // `stvflow serve` so the browser stays same-origin.
    proxy: {
      "/elections": "http://127.0.0.1:8000",
    },
  },
});
