// Application wiring: one API client, one view state, four panels.
// Every tracked gesture produces exactly one interaction event: node
// clicks and source expansions post here, score changes and feedback are
// recorded server-side by their endpoints.

import { TriageApi } from "./api.js";
import { FeedbackBox } from "./feedback_box.js";
import { GraphView } from "./graph_view.js";
import { ScorePanel } from "./score_panel.js";
import { SourceView } from "./source_view.js";
import { expandSource, initialState, selectFunction, type ViewState } from "./state.js";
import type { GraphPayload } from "./types.js";

export interface AppContainers {
  title: HTMLElement;
  graph: HTMLElement;
  panel: HTMLElement;
  source: HTMLElement;
  feedback: HTMLElement;
}

export class App {
  state: ViewState = initialState("");
  readonly graphView: GraphView;
  readonly scorePanel: ScorePanel;
  readonly sourceView: SourceView;
  readonly feedbackBox: FeedbackBox;
  private graph: GraphPayload | null = null;

  constructor(
    private readonly containers: AppContainers,
    readonly api: TriageApi,
  ) {
    this.graphView = new GraphView(containers.graph, {
      onSelect: (name) => void this.handleSelect(name),
    });
    this.scorePanel = new ScorePanel(containers.panel, api, () => this.state.sessionId);
    this.sourceView = new SourceView(containers.source, {
      onExpand: (name) => this.handleSourceExpand(name),
    });
    this.feedbackBox = new FeedbackBox(
      containers.feedback,
      api,
      () => this.state.sessionId,
      () => (this.state.selectedFunction ? [this.state.selectedFunction] : []),
    );
  }

  async start(): Promise<void> {
    this.state = initialState(await this.api.session());
    this.graph = await this.api.graph();
    this.containers.title.textContent = `${this.graph.program} ${this.graph.version}`;
    this.graphView.render(this.graph);
    this.sourceView.setGraph(this.graph);
    this.scorePanel.clear();
    this.feedbackBox.render();
  }

  /** Node click: select, log exactly one node_clicked, open the panel. */
  async handleSelect(name: string): Promise<void> {
    this.state = selectFunction(this.state, name);
    await this.api.event("node_clicked", name, this.state.sessionId);
    const node = this.graph?.nodes.find((n) => n.name === name);
    if (node?.vulnerable) {
      await this.scorePanel.load(name);
    } else {
      this.scorePanel.clear();
    }
    this.sourceView.show(name);
  }

  /** First expansion of a function's source logs one source_expanded. */
  handleSourceExpand(name: string): void {
    const [next, firstExpansion] = expandSource(this.state, name);
    this.state = next;
    if (firstExpansion) {
      void this.api.event("source_expanded", name, this.state.sessionId);
    }
  }
}

export function mountApp(root: Document, baseUrl = ""): App {
  const byId = (id: string): HTMLElement => {
    const el = root.getElementById(id);
    if (!el) {
      throw new Error(`missing container #${id}`);
    }
    return el;
  };
  return new App(
    {
      title: byId("program-title"),
      graph: byId("graph"),
      panel: byId("score-panel"),
      source: byId("source-view"),
      feedback: byId("feedback-box"),
    },
    new TriageApi(baseUrl),
  );
}
