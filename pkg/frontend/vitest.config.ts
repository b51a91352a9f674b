import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the integration test boots the Python service
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
