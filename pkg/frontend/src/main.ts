// Entry point: pick the gateway origin, build the controller, mount the page.
//
// The gateway base URL defaults to the page's own origin (the gateway can
// serve this bundle itself) and can be overridden with ?gateway=<origin>.

import { GatewayClient } from "./gateway.js";
import { TranslatorController } from "./state.js";
import { mount } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("gateway") ?? window.location.origin;

const controller = new TranslatorController(new GatewayClient(baseUrl));
const root = document.getElementById("app");
if (root === null) {
  throw new Error("page is missing the #app container");
}
mount(root, controller);
