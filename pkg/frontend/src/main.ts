import { Editor } from "./editor.js";

const SAMPLE = `Include functions.

Let A,B,C be set.

Let f: A → B.
Let g: B → C.

Lemma: g∘f is injective implies f is injective.
Proof:
  Assume g∘f is injective.
  Assume x ∈ A and x' ∈ A and (f{x}) = (f{x'}).
  Then ((g∘f){x}) = ((g∘f){x'}) by compositionApp.
  Hence x = x' by injectiveApp, composition.
  Hence f is injective by injectiveApp.
qed.
`;

const root = document.getElementById("app");
if (root) {
  const editor = new Editor(root);
  editor.setBuffer(SAMPLE);
}
