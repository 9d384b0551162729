// Frame-strip player: cycles pre-captured frames through one <img>,
// which is exactly how the service means animation to be viewed.

export class FramePlayer {
  private urls: string[] = [];
  private index = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private img: HTMLImageElement,
    private intervalMs = 400,
  ) {}

  load(urls: string[]): void {
    this.stop();
    this.urls = urls;
    this.index = 0;
    if (urls.length > 0) {
      this.img.src = urls[0];
      if (urls.length > 1) this.start();
    } else {
      this.img.removeAttribute("src");
    }
  }

  setRate(intervalMs: number): void {
    this.intervalMs = intervalMs;
    if (this.timer !== null) {
      this.stop();
      this.start();
    }
  }

  start(): void {
    if (this.timer !== null || this.urls.length < 2) return;
    this.timer = setInterval(() => {
      this.index = (this.index + 1) % this.urls.length;
      this.img.src = this.urls[this.index];
    }, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  get frameCount(): number {
    return this.urls.length;
  }

  get currentIndex(): number {
    return this.index;
  }
}
