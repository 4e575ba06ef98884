import java.math.BigDecimal;
import java.util.PriorityQueue;

public class HalveArray {
    public static int main(String[] args) {
        int[] nums = {5, 19, 8, 1};
        BigDecimal sum = BigDecimal.ZERO;
        PriorityQueue<BigDecimal> queue = new PriorityQueue<>();
        for (int num : nums) {
            sum = sum.add(BigDecimal.valueOf(num).divide(BigDecimal.valueOf(2)));
            queue.add(BigDecimal.valueOf(-num));
        }
        int ops = 0;
        BigDecimal half = BigDecimal.ZERO;
        while (half.compareTo(sum) < 0) {
            BigDecimal top = queue.poll().negate().divide(BigDecimal.valueOf(2));
            half = half.add(top);
            queue.add(top.negate());
            ops++;
        }
        return ops;
    }
}
