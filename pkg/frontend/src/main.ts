/**
 * Entry point: read the session from the query string, start the loop.
 *
 *   index.html?service=http://127.0.0.1:8400&annotator=ann-1&role=annotator
 */

import { ApiClient, Role } from "./api.js";
import { AnnotationController } from "./controller.js";
import { render } from "./render.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8400";
const annotatorId = params.get("annotator") ?? "ann-1";
const role = (params.get("role") ?? "annotator") as Role;
const token = params.get("token");

const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");

const controller = new AnnotationController(
  new ApiClient(baseUrl, token),
  annotatorId,
  role,
  params.get("batch") ?? undefined,
);

void controller.loadNext().then(() => render(root, controller));
