import { defineConfig } from "vite";

// Dev-server proxy to a locally running analysis service; the built
// bundle expects to be served from the same origin as the API.
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8000",
      "/healthz": "http://127.0.0.1:8000",
    },
  },
});
